//! Product coherent-state energy surface and its minimisation.
//!
//! The trial state is `|γ⟩^{⊗N_a} ⊗ |α_1⟩ ⊗ … ⊗ |α_ℓ⟩` with `γ_k = ρ_k e^{iφ_k}`
//! and `α_s = √N_a r_s e^{iθ_s}`. All energies are per atom.

mod minimize;
mod overlap;
mod surface;

use num_complex::Complex64;

pub use minimize::{minimize_ground, refine_ground, GroundSolution, MinimizeOptions, Region, NORMAL_ETA, TIE_TOL};
pub use overlap::{bures_distance, state_overlap, ProductState};
pub use surface::{ReducedSurface, SphereChart, SurfaceEval};

use crate::error::{Error, Result};
use crate::model::{GTable, ModelSpec};

/// Variational parameters. Vectors are full length with `rho[0] = 1` and
/// `phi[0] = 0`; `r` and `theta` have one entry per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentParams {
    pub rho: Vec<f64>,
    pub phi: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
}

impl CoherentParams {
    /// Matter amplitudes `ρ_2…ρ_n`, phases `φ_2…φ_n` and field parameters.
    pub fn new(rho_tail: &[f64], phi_tail: &[f64], r: &[f64], theta: &[f64]) -> Result<Self> {
        if rho_tail.len() != phi_tail.len() || r.len() != theta.len() {
            return Err(Error::InvalidInput("parameter vectors have mismatched lengths".into()));
        }
        if rho_tail.iter().chain(r).any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("ρ and r must be finite and non-negative".into()));
        }
        let mut rho = vec![1.0];
        rho.extend_from_slice(rho_tail);
        let mut phi = vec![0.0];
        phi.extend_from_slice(phi_tail);
        Ok(Self {
            rho,
            phi,
            r: r.to_vec(),
            theta: theta.to_vec(),
        })
    }

    /// Everything in the lowest level with the field in vacuum.
    pub fn normal(levels: usize, modes: usize) -> Self {
        let mut rho = vec![0.0; levels];
        rho[0] = 1.0;
        Self {
            rho,
            phi: vec![0.0; levels],
            r: vec![0.0; modes],
            theta: vec![0.0; modes],
        }
    }

    pub fn gamma(&self) -> Vec<Complex64> {
        self.rho
            .iter()
            .zip(&self.phi)
            .map(|(&r, &p)| Complex64::from_polar(r, p))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.rho.iter().map(|r| r * r).sum()
    }

    fn check(&self, model: &ModelSpec) -> Result<()> {
        if self.rho.len() != model.levels || self.phi.len() != model.levels {
            return Err(Error::InvalidInput(format!(
                "expected {} matter amplitudes, got {}",
                model.levels,
                self.rho.len()
            )));
        }
        if self.r.len() != model.modes.len() || self.theta.len() != model.modes.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} field amplitudes, got {}",
                model.modes.len(),
                self.r.len()
            )));
        }
        Ok(())
    }
}

/// Dipole-dipole energy per atom split into its three index blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdEnergy {
    /// Terms with `{j,k} = {l,m}`.
    pub pair: f64,
    /// Terms whose two transitions share one level.
    pub shared: f64,
    /// Terms on four distinct levels.
    pub four: f64,
}

impl DdEnergy {
    pub fn total(&self) -> f64 {
        self.pair + self.shared + self.four
    }
}

/// `ℰ_dd = ½ Re Σ g_jklm γ_j* γ_k γ_l* γ_m / ‖γ‖⁴`, the large-`N_a` expectation of
/// `H_dd / N_a` with self-interactions removed.
pub fn dd_energy(gamma: &[Complex64], gtable: &GTable) -> DdEnergy {
    let norm2: f64 = gamma.iter().map(|g| g.norm_sqr()).sum();
    let mut out = DdEnergy::default();
    if norm2 == 0.0 {
        return out;
    }
    let scale = 0.5 / (norm2 * norm2);
    for (&[j, k, l, m], &g) in gtable.iter() {
        let v = (g * gamma[j].conj() * gamma[k] * gamma[l].conj() * gamma[m]).re * scale;
        let distinct = {
            let mut idx = [j, k, l, m];
            idx.sort_unstable();
            1 + idx.windows(2).filter(|w| w[0] != w[1]).count()
        };
        match distinct {
            2 => out.pair += v,
            3 => out.shared += v,
            _ => out.four += v,
        }
    }
    out
}

/// Matter-field overlap `Σ_{pairs of mode s} μ Re(γ_j* γ_k)` for each mode.
fn mode_sums(gamma: &[Complex64], model: &ModelSpec) -> Vec<f64> {
    let mut sums = vec![0.0; model.modes.len()];
    for c in model.couplings.iter().filter(|c| c.mu != 0.0) {
        sums[c.mode] += c.mu * (gamma[c.lower].conj() * gamma[c.upper]).re;
    }
    sums
}

/// Energy per atom of the product coherent state.
pub fn energy(params: &CoherentParams, model: &ModelSpec) -> Result<f64> {
    params.check(model)?;
    let gamma = params.gamma();
    let n2 = params.norm_sqr();
    let field: f64 = model.modes.iter().zip(&params.r).map(|(w, r)| w * r * r).sum();
    let matter: f64 = model
        .omegas
        .iter()
        .zip(&gamma)
        .map(|(w, g)| w * g.norm_sqr())
        .sum::<f64>()
        / n2;
    let coupling: f64 = mode_sums(&gamma, model)
        .iter()
        .zip(params.r.iter().zip(&params.theta))
        .map(|(s, (r, t))| -4.0 * s * r * t.cos() / n2)
        .sum();
    Ok(field + matter + coupling + dd_energy(&gamma, &model.gtable).total())
}

/// Partial derivatives of [`energy`] with respect to every free parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyGradient {
    /// `∂E/∂ρ_k` for `k = 2…n`.
    pub rho: Vec<f64>,
    /// `∂E/∂φ_k` for `k = 2…n`.
    pub phi: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
}

impl EnergyGradient {
    pub fn flat(&self) -> Vec<f64> {
        [&self.rho[..], &self.phi, &self.r, &self.theta].concat()
    }
}

/// Analytic gradient of [`energy`]; assumes a hermitian g-table so that the
/// dipole-dipole sum is real before taking its real part.
pub fn energy_gradient(params: &CoherentParams, model: &ModelSpec) -> Result<EnergyGradient> {
    params.check(model)?;
    let gamma = params.gamma();
    let n = gamma.len();
    let n2 = params.norm_sqr();

    // Wirtinger derivatives ∂E/∂γ_a, treating γ* as independent.
    let mut dg = vec![Complex64::default(); n];

    let matter: f64 = model
        .omegas
        .iter()
        .zip(&gamma)
        .map(|(w, g)| w * g.norm_sqr())
        .sum::<f64>()
        / n2;
    for a in 0..n {
        dg[a] += (model.omegas[a] - matter) * gamma[a].conj() / n2;
    }

    let sums = mode_sums(&gamma, model);
    let mut coupling = 0.0;
    let weights: Vec<f64> = params
        .r
        .iter()
        .zip(&params.theta)
        .map(|(r, t)| -4.0 * r * t.cos())
        .collect();
    for (s, w) in sums.iter().zip(&weights) {
        coupling += w * s / n2;
    }
    for c in model.couplings.iter().filter(|c| c.mu != 0.0) {
        let w = weights[c.mode] * c.mu / n2;
        // Re(γ_j* γ_k) = (γ_j* γ_k + γ_j γ_k*)/2.
        dg[c.upper] += w * 0.5 * gamma[c.lower].conj();
        dg[c.lower] += w * 0.5 * gamma[c.upper].conj();
    }
    for a in 0..n {
        dg[a] -= coupling * gamma[a].conj() / n2;
    }

    let dd = dd_energy(&gamma, &model.gtable).total();
    let scale = 0.5 / (n2 * n2);
    for (&[j, k, l, m], &g) in model.gtable.iter() {
        dg[k] += scale * g * gamma[j].conj() * gamma[l].conj() * gamma[m];
        dg[m] += scale * g * gamma[j].conj() * gamma[k] * gamma[l].conj();
    }
    for a in 0..n {
        dg[a] -= 2.0 * dd * gamma[a].conj() / n2;
    }

    let mut out = EnergyGradient {
        rho: Vec::new(),
        phi: Vec::new(),
        r: Vec::new(),
        theta: Vec::new(),
    };
    for a in 1..n {
        let e = Complex64::from_polar(1.0, params.phi[a]);
        out.rho.push(2.0 * (dg[a] * e).re);
        out.phi.push(2.0 * (dg[a] * Complex64::i() * gamma[a]).re);
    }
    for (s, &omega) in model.modes.iter().enumerate() {
        let (r, t) = (params.r[s], params.theta[s]);
        out.r.push(2.0 * omega * r - 4.0 * sums[s] * t.cos() / n2);
        out.theta.push(4.0 * sums[s] * r * t.sin() / n2);
    }
    Ok(out)
}

/// Field amplitudes minimising the energy for fixed matter parameters on a
/// discrete phase branch: `r_s = 2 Σ (μ/Ω_s) ρ_j ρ_k cos φ_jk cos θ_s / ‖γ‖²`.
pub fn field_critical(rho: &[f64], phi: &[f64], theta: &[f64], model: &ModelSpec) -> Result<Vec<f64>> {
    let params = CoherentParams {
        rho: rho.to_vec(),
        phi: phi.to_vec(),
        r: vec![0.0; theta.len()],
        theta: theta.to_vec(),
    };
    params.check(model)?;
    let sums = mode_sums(&params.gamma(), model);
    let n2 = params.norm_sqr();
    let mut r = Vec::with_capacity(sums.len());
    for (s, (sum, t)) in sums.iter().zip(theta).enumerate() {
        let v = 2.0 * sum * t.cos() / (model.modes[s] * n2);
        if v < -1e-12 * (1.0 + sum.abs()) {
            return Err(Error::InadmissibleBranch { mode: s + 1 });
        }
        r.push(v.max(0.0));
    }
    Ok(r)
}
