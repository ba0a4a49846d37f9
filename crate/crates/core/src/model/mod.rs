//! System description: levels, field modes, matter-field couplings and the
//! dipole-dipole table, plus the assembly of the dipole-dipole Hamiltonian.

mod config;
mod file;
mod gtable;
mod hdd;

use std::collections::BTreeMap;

pub use config::{configuration, configuration_names, mu_from_x, named_configuration, table_rows, Configuration, GRow};
pub use file::{load_model, parse_model, ModelFile};
pub use gtable::{g_from_dipoles, gtable_from_geometry, one_based, GIndex, GTable};
pub use hdd::{assemble_hdd, hdd_double_sum, HddMatrices};

use crate::error::{Error, Result};

/// Matter-field coupling of the transition `lower ↔ upper` to one mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub lower: usize,
    pub upper: usize,
    pub mode: usize,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub levels: usize,
    /// Level energies, `omegas[0] = 0` and `omegas[n-1] = 1`.
    pub omegas: Vec<f64>,
    /// Mode frequencies `Ω_s`.
    pub modes: Vec<f64>,
    pub couplings: Vec<Coupling>,
    pub gtable: GTable,
    pub real_dipoles: bool,
    pub config: String,
}

impl ModelSpec {
    /// Whether the unordered transition `{j, k}` has a coupling entry (even with μ = 0).
    pub fn serves(&self, j: usize, k: usize) -> bool {
        let (a, b) = (j.min(k), j.max(k));
        self.couplings.iter().any(|c| c.lower == a && c.upper == b)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.levels;
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 levels, got {n}")));
        }
        if self.omegas.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} level energies, got {}",
                self.omegas.len()
            )));
        }
        if self.omegas[0].abs() > 1e-12 || (self.omegas[n - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(
                "level energies must be normalised to ω_1 = 0, ω_n = 1".into(),
            ));
        }
        if self.omegas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("level energies must be strictly increasing".into()));
        }
        if self.modes.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("mode frequencies must be positive".into()));
        }
        for c in &self.couplings {
            if c.upper >= n {
                return Err(Error::LevelOutOfRange {
                    index: c.upper,
                    levels: n,
                });
            }
            if c.lower >= c.upper {
                return Err(Error::InvalidInput(format!(
                    "coupling ({}, {}) must name a lower then an upper level",
                    c.lower + 1,
                    c.upper + 1
                )));
            }
            if c.mode >= self.modes.len() {
                return Err(Error::InvalidInput(format!(
                    "coupling refers to missing mode {}",
                    c.mode + 1
                )));
            }
            if !c.mu.is_finite() {
                return Err(Error::InvalidInput("coupling strength must be finite".into()));
            }
        }
        validate_couplings(self)?;
        if self.gtable.levels() != n {
            return Err(Error::InvalidInput("g-table level count differs from the model".into()));
        }
        let bad = self.gtable.violations(self.real_dipoles, |j, k| self.serves(j, k));
        if !bad.is_empty() {
            return Err(Error::GTable(bad));
        }
        Ok(())
    }

    /// Couplings grouped by mode, skipping those with μ = 0.
    pub fn mode_pairs(&self) -> Vec<Vec<(usize, usize, f64)>> {
        let mut out = vec![Vec::new(); self.modes.len()];
        for c in &self.couplings {
            if c.mu != 0.0 {
                out[c.mode].push((c.lower, c.upper, c.mu));
            }
        }
        out
    }

    /// Copy with the couplings of the given transitions set to `x` times their
    /// bare critical value `½√(Ω_s ω_jk)`.
    pub fn with_axes(&self, axes: &[(usize, usize)], x: &[f64]) -> Self {
        let mut out = self.clone();
        for (&(j, k), &xv) in axes.iter().zip(x) {
            for c in out.couplings.iter_mut().filter(|c| (c.lower, c.upper) == (j, k)) {
                c.mu = mu_from_x(xv, self.modes[c.mode], self.omegas[k] - self.omegas[j]);
            }
        }
        out
    }

    pub fn coupling_for(&self, lower: usize, upper: usize) -> Option<&Coupling> {
        self.couplings
            .iter()
            .find(|c| c.lower == lower && c.upper == upper && c.mu != 0.0)
    }
}

/// Each transition is driven by at most one mode with non-zero strength.
pub fn validate_couplings(model: &ModelSpec) -> Result<()> {
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut bad = Vec::new();
    for c in model.couplings.iter().filter(|c| c.mu != 0.0) {
        let key = (c.lower, c.upper);
        match seen.get(&key) {
            Some(&mode) if mode != c.mode => {
                if !bad.contains(&key) {
                    bad.push(key);
                }
            }
            _ => {
                seen.insert(key, c.mode);
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Coupling(bad.into_iter().map(|(a, b)| (a + 1, b + 1)).collect()))
    }
}
