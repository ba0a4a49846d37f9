use super::{bures_ridge, casimir_fields, derivative_fields, Field, PhaseGrid};
use crate::error::Result;

/// Inputs shared by all detectors.
#[derive(Clone, Copy, Debug)]
pub struct DetectorContext<'a> {
    pub grid: &'a PhaseGrid,
    /// Atom number for the Casimir difference.
    pub casimir_atoms: f64,
    /// Atom number for the Bures distance.
    pub bures_atoms: f64,
    /// Bures offset in coupling units.
    pub eps: f64,
}

/// A scalar surface computed from a completed scan.
pub trait Detector: Send + Sync {
    /// Short name, also the stem of the CSV file.
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn applies(&self, _grid: &PhaseGrid) -> bool {
        true
    }
    fn compute(&self, ctx: &DetectorContext) -> Result<Field>;
}

struct Energy;

impl Detector for Energy {
    fn name(&self) -> &'static str {
        "E_min"
    }
    fn describe(&self) -> &'static str {
        "minimum energy per atom"
    }
    fn compute(&self, ctx: &DetectorContext) -> Result<Field> {
        Ok(ctx.grid.energy.clone())
    }
}

struct FirstDerivative;

impl Detector for FirstDerivative {
    fn name(&self) -> &'static str {
        "dE"
    }
    fn describe(&self) -> &'static str {
        "sum of first partial derivatives of E_min"
    }
    fn compute(&self, ctx: &DetectorContext) -> Result<Field> {
        Ok(derivative_fields(ctx.grid)?.d_e)
    }
}

struct SecondDerivative;

impl Detector for SecondDerivative {
    fn name(&self) -> &'static str {
        "d2E"
    }
    fn describe(&self) -> &'static str {
        "sum of partial derivatives of dE"
    }
    fn compute(&self, ctx: &DetectorContext) -> Result<Field> {
        Ok(derivative_fields(ctx.grid)?.d2_e)
    }
}

struct CasimirDifference;

impl Detector for CasimirDifference {
    fn name(&self) -> &'static str {
        "dC"
    }
    fn describe(&self) -> &'static str {
        "difference of the subsystem Casimir expectations"
    }
    fn applies(&self, grid: &PhaseGrid) -> bool {
        grid.axes.len() == 2
    }
    fn compute(&self, ctx: &DetectorContext) -> Result<Field> {
        Ok(casimir_fields(ctx.grid, ctx.casimir_atoms)?.delta)
    }
}

struct BuresRidge;

impl Detector for BuresRidge {
    fn name(&self) -> &'static str {
        "bures"
    }
    fn describe(&self) -> &'static str {
        "largest Bures distance to the four offset ground states"
    }
    fn compute(&self, ctx: &DetectorContext) -> Result<Field> {
        bures_ridge(ctx.grid, ctx.bures_atoms, ctx.eps)
    }
}

pub fn detectors() -> Vec<Box<dyn Detector>> {
    vec![
        Box::new(Energy),
        Box::new(FirstDerivative),
        Box::new(SecondDerivative),
        Box::new(CasimirDifference),
        Box::new(BuresRidge),
    ]
}

pub fn detector(name: &str) -> Option<Box<dyn Detector>> {
    detectors().into_iter().find(|d| d.name() == name)
}

pub fn detector_names() -> Vec<&'static str> {
    detectors().iter().map(|d| d.name()).collect()
}
