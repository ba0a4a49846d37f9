//! Two-parameter sweeps of the variational ground state and the detectors
//! built on top of them: Ehrenfest derivatives, the Casimir difference, the
//! Bures ridge and the separatrix curves.

mod bures;
mod casimir;
mod derivatives;
mod detectors;
mod output;
mod separatrix;

use rayon::prelude::*;
use serde::Serialize;

pub use bures::bures_ridge;
pub use casimir::{casimir_delta, casimir_expectation, casimir_fields, subregion, CasimirFields, Phase};
pub use derivatives::{derivative_fields, Derivatives};
pub use detectors::{detector, detector_names, detectors, Detector, DetectorContext};
pub use output::{gnuplot_script, write_field_csv, Summary};
pub use separatrix::{
    classify_separatrix, extract_separatrix, BoundaryEdge, Classification, CurveKind, JumpRule, Order, SeparatrixCurve,
};

use crate::error::{Error, Result};
use crate::model::{configuration, named_configuration, GRow, ModelSpec};
use crate::variational::{minimize_ground, refine_ground, GroundSolution, MinimizeOptions};

/// Scalar values on the scan grid, stored row-major with `x_jk` varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            values: vec![0.0; nx * ny],
        }
    }

    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(f(ix, iy));
            }
        }
        Self { nx, ny, values }
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.values[iy * self.nx + ix] = v;
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evenly spaced samples `from, from + step, …, to`.
pub fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count)
            .map(|i| from + (to - from) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Provenance of a scan, copied into every summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanMeta {
    pub config: String,
    pub g_row: Option<String>,
    pub mid: Option<f64>,
    pub seed: u64,
    /// Transitions spanning the plane, one-based.
    pub axes: Vec<[usize; 2]>,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub minimize: MinimizeOptions,
    /// Second pass seeded from the neighbouring solutions.
    pub warm: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            minimize: MinimizeOptions::default(),
            warm: true,
        }
    }
}

/// Ground solutions on a rectangular `(x_jk, x_lm)` grid.
#[derive(Clone, Debug)]
pub struct PhaseGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Zero-based transitions whose couplings the axes scale.
    pub axes: Vec<(usize, usize)>,
    pub template: ModelSpec,
    pub cells: Vec<GroundSolution>,
    pub energy: Field,
    /// Nodes whose minimisation did not reach the gradient tolerance.
    pub failures: Vec<(usize, usize)>,
    pub meta: ScanMeta,
    pub options: ScanOptions,
}

impl PhaseGrid {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &GroundSolution {
        &self.cells[iy * self.xs.len() + ix]
    }

    /// Model at an arbitrary point of the plane.
    pub fn model_at(&self, x: f64, y: f64) -> ModelSpec {
        self.template.with_axes(&self.axes, &[x, y])
    }

    pub fn normal_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_normal()).count()
    }
}

fn check_axis(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidInput(format!("axis {name} is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!(
            "axis {name} must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Minimise every node of the grid.
///
/// All nodes are first solved from the cold multistart set, in parallel. A
/// second sweep then re-descends from the four neighbouring cold solutions and
/// keeps a result only when it is lower by more than the tie window, so the
/// output does not depend on traversal order.
pub fn scan_ground(
    template: &ModelSpec,
    axes: &[(usize, usize)],
    xs: &[f64],
    ys: &[f64],
    opts: &ScanOptions,
    meta: ScanMeta,
) -> Result<PhaseGrid> {
    template.validate()?;
    check_axis(xs, "x_jk")?;
    check_axis(ys, "x_lm")?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidInput("a scan needs one or two coupling axes".into()));
    }
    if axes.len() == 1 && ys.len() != 1 {
        return Err(Error::InvalidInput(
            "a single-axis configuration takes a degenerate x_lm axis".into(),
        ));
    }
    for &(j, k) in axes {
        if !template.serves(j, k) {
            return Err(Error::InvalidInput(format!(
                "transition ({}, {}) has no coupling to scale",
                j + 1,
                k + 1
            )));
        }
    }

    let (nx, ny) = (xs.len(), ys.len());
    let model_at = |i: usize| template.with_axes(axes, &[xs[i % nx], ys[i / nx]]);
    let cold: Vec<GroundSolution> = (0..nx * ny)
        .into_par_iter()
        .map(|i| minimize_ground(&model_at(i), &opts.minimize))
        .collect::<Result<_>>()?;

    let cells: Vec<GroundSolution> = if opts.warm {
        (0..nx * ny)
            .into_par_iter()
            .map(|i| {
                let (ix, iy) = (i % nx, i / nx);
                let mut hints = Vec::with_capacity(4);
                let mut push = |jx: usize, jy: usize| {
                    let s = &cold[jy * nx + jx];
                    if !s.is_normal() {
                        hints.push(s.amplitudes.clone());
                    }
                };
                if ix > 0 {
                    push(ix - 1, iy);
                }
                if ix + 1 < nx {
                    push(ix + 1, iy);
                }
                if iy > 0 {
                    push(ix, iy - 1);
                }
                if iy + 1 < ny {
                    push(ix, iy + 1);
                }
                if hints.is_empty() {
                    cold[i].clone()
                } else {
                    refine_ground(&model_at(i), &cold[i], &hints, &opts.minimize)
                }
            })
            .collect()
    } else {
        cold
    };

    let energy = Field {
        nx,
        ny,
        values: cells.iter().map(|c| c.energy).collect(),
    };
    let failures = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.converged)
        .map(|(i, _)| (i % nx, i / nx))
        .collect();
    Ok(PhaseGrid {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        axes: axes.to_vec(),
        template: template.clone(),
        cells,
        energy,
        failures,
        meta,
        options: opts.clone(),
    })
}

/// Scan a named configuration with one of the tabulated (or explicit) g rows.
pub fn scan_configuration(
    name: &str,
    mid: Option<f64>,
    row: &GRow,
    xs: &[f64],
    ys: &[f64],
    opts: &ScanOptions,
) -> Result<PhaseGrid> {
    let config = configuration(name)?;
    let template = named_configuration(name, mid, row, [0.0, 0.0])?;
    let meta = ScanMeta {
        config: config.name.to_string(),
        g_row: Some(row.name.clone()),
        mid: config.default_mid.map(|d| mid.unwrap_or(d)),
        seed: opts.minimize.seed,
        axes: config.axes.iter().map(|&(j, k)| [j + 1, k + 1]).collect(),
    };
    scan_ground(&template, config.axes, xs, ys, opts, meta)
}
