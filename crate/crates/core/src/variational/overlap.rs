use num_complex::Complex64;

use super::GroundSolution;
use crate::error::{Error, Result};

/// Product coherent state `|γ⟩^{⊗N_a} ⊗ |α⟩`; `alpha` holds the full field
/// amplitudes `α_s = √N_a r_s e^{iθ_s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub alpha: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
}

impl ProductState {
    pub fn from_solution(solution: &GroundSolution, atoms: f64) -> Self {
        let p = &solution.params;
        let alpha =
            p.r.iter()
                .zip(&p.theta)
                .map(|(&r, &t)| Complex64::from_polar(atoms.sqrt() * r, t))
                .collect();
        let gamma = solution.amplitudes.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self { alpha, gamma }
    }
}

/// `⟨a|b⟩ = exp(−(|α|² + |α′|² − 2α*·α′)/2) · (γ*·γ′/(‖γ‖‖γ′‖))^{N_a}`.
pub fn state_overlap(a: &ProductState, b: &ProductState, atoms: f64) -> Result<Complex64> {
    if a.alpha.len() != b.alpha.len() || a.gamma.len() != b.gamma.len() {
        return Err(Error::InvalidInput("states live in different spaces".into()));
    }
    let dot = |u: &[Complex64], v: &[Complex64]| u.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<Complex64>();
    let na: f64 = a.alpha.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.alpha.iter().map(|z| z.norm_sqr()).sum();
    let field = (-(na + nb - 2.0 * dot(&a.alpha, &b.alpha)) / 2.0).exp();
    let ga = dot(&a.gamma, &a.gamma).re.sqrt();
    let gb = dot(&b.gamma, &b.gamma).re.sqrt();
    if ga == 0.0 || gb == 0.0 {
        return Err(Error::InvalidInput("matter amplitude vector is zero".into()));
    }
    let m = dot(&a.gamma, &b.gamma) / (ga * gb);
    let matter = if m.norm() == 0.0 {
        Complex64::default()
    } else {
        (m.ln() * atoms).exp()
    };
    Ok(field * matter)
}

/// `D_B = √2 · √(1 − |⟨a|b⟩|²)`, in `[0, √2]`.
pub fn bures_distance(a: &ProductState, b: &ProductState, atoms: f64) -> Result<f64> {
    let f = state_overlap(a, b, atoms)?.norm_sqr().min(1.0);
    Ok(2f64.sqrt() * (1.0 - f).sqrt())
}
