//! Independent checks of the variational results: exact diagonalisation of the
//! full Hamiltonian at small `N_a`, and a dense grid search of the reduced surface.

mod brute;
mod eigen;

use num_complex::Complex64;
use serde::Serialize;

pub use brute::{brute_min, BruteMin, DEFAULT_RESOLUTION};
pub use eigen::{
    eigensolver, eigensolvers, select_eigensolver, DenseSolver, Eigenpair, Eigensolver, LanczosSolver,
    DENSE_EIGEN_MAX_DIM,
};

use crate::algebra::{symmetric_dimension, CollectiveOps, OccupationBasis};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{assemble_hdd, ModelSpec};
use crate::variational::{minimize_ground, MinimizeOptions};

type CMatrix = Matrix<Complex64>;

/// Default cap on the truncated Hilbert-space dimension.
pub const DEFAULT_CAP: usize = 200_000;
pub const CAP_ENV: &str = "DDPHASE_MAX_DIM";

/// The cap from `DDPHASE_MAX_DIM`, or [`DEFAULT_CAP`].
pub fn dimension_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Symmetric atomic sector times a truncated Fock space per mode.
#[derive(Clone, Debug)]
pub struct TruncatedSpace {
    pub basis: OccupationBasis,
    /// Highest photon number kept, per mode.
    pub cutoffs: Vec<usize>,
}

impl TruncatedSpace {
    pub fn new(levels: usize, atoms: usize, cutoffs: &[usize], cap: usize) -> Result<Self> {
        let dim = Self::dimension(levels, atoms, cutoffs);
        if dim > cap {
            return Err(Error::Sizing { dim, cap });
        }
        let basis = OccupationBasis::enumerate_capped(levels, atoms, cap)?;
        Ok(Self {
            basis,
            cutoffs: cutoffs.to_vec(),
        })
    }

    /// Total dimension without building anything, saturating on overflow.
    pub fn dimension(levels: usize, atoms: usize, cutoffs: &[usize]) -> usize {
        cutoffs
            .iter()
            .fold(symmetric_dimension(levels, atoms), |acc, &c| acc.saturating_mul(c + 1))
    }

    /// Factor dimensions, atoms first.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.basis.dim())
            .chain(self.cutoffs.iter().map(|c| c + 1))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    /// Embed one factor operator into the full space.
    fn embed(&self, factor: usize, op: &CMatrix) -> CMatrix {
        let dims = self.dims();
        let left: usize = dims[..factor].iter().product();
        let right: usize = dims[factor + 1..].iter().product();
        CMatrix::identity(left).kron(op).kron(&CMatrix::identity(right))
    }
}

fn annihilation(cutoff: usize) -> CMatrix {
    Matrix::from_triplets(
        cutoff + 1,
        (1..=cutoff).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))),
    )
}

fn number(cutoff: usize) -> CMatrix {
    Matrix::from_triplets(cutoff + 1, (0..=cutoff).map(|n| (n, n, Complex64::new(n as f64, 0.0))))
}

/// `Σ Ω_s ν_s + Σ ω_k A_kk − (1/√N_a) Σ μ (A_jk + A_kj)(a_s + a_s†) + H_dd`.
pub fn hamiltonian(model: &ModelSpec, space: &TruncatedSpace) -> Result<CMatrix> {
    model.validate()?;
    if space.basis.levels() != model.levels || space.cutoffs.len() != model.modes.len() {
        return Err(Error::BasisMismatch);
    }
    let ops = CollectiveOps::new(space.basis.clone())?;
    let atoms = space.basis.atoms() as f64;
    let real = |v: f64| Complex64::new(v, 0.0);

    let mut matter = Matrix::zeros(space.basis.dim());
    for (k, &w) in model.omegas.iter().enumerate() {
        if w != 0.0 {
            matter.axpy(real(w), &ops.get(k, k).to_complex());
        }
    }
    matter = matter.add(&assemble_hdd(model, &ops)?.total);
    let mut h = space.embed(0, &matter);

    for (s, (&omega, &cutoff)) in model.modes.iter().zip(&space.cutoffs).enumerate() {
        h = h.add(&space.embed(s + 1, &number(cutoff)).scale(real(omega)));
        let pairs: Vec<_> = model.couplings.iter().filter(|c| c.mode == s && c.mu != 0.0).collect();
        if pairs.is_empty() {
            continue;
        }
        let mut dipole = Matrix::zeros(space.basis.dim());
        for c in pairs {
            let sym = ops.get(c.lower, c.upper).add(ops.get(c.upper, c.lower));
            dipole.axpy(real(c.mu), &sym.to_complex());
        }
        let a = annihilation(cutoff);
        let quadrature = space.embed(s + 1, &a.add(&a.adjoint()));
        let coupling = space.embed(0, &dipole).mul(&quadrature);
        h = h.sub(&coupling.scale(real(1.0 / atoms.sqrt())));
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct ExactOptions {
    pub cap: usize,
    /// Largest acceptable energy shift per atom when every cutoff grows by `step`.
    pub tol: f64,
    pub step: usize,
    pub max_growths: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            cap: dimension_cap(),
            tol: 1e-8,
            step: 5,
            max_growths: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactGround {
    /// Lowest eigenvalue divided by `N_a`, at the larger of the last two cutoffs.
    pub energy: f64,
    pub cutoffs: Vec<usize>,
    pub dim: usize,
    pub solver: String,
    /// Energy change per atom between the last two cutoff sets.
    pub shift: f64,
    pub converged: bool,
    /// `⟨Σ_q A_qq⟩` in the ground state.
    pub atom_number: f64,
    /// `⟨Σ_pq A_pq A_qp⟩` in the ground state.
    pub casimir: f64,
}

struct Solved {
    energy: f64,
    dim: usize,
    solver: &'static str,
    vector: Vec<Complex64>,
    space: TruncatedSpace,
}

fn solve(model: &ModelSpec, atoms: usize, cutoffs: &[usize], cap: usize) -> Result<Solved> {
    let space = TruncatedSpace::new(model.levels, atoms, cutoffs, cap)?;
    let h = hamiltonian(model, &space)?;
    let solver = select_eigensolver(h.dim());
    let pair = solver.lowest(&h)?;
    Ok(Solved {
        energy: pair.value / atoms as f64,
        dim: h.dim(),
        solver: solver.name(),
        vector: pair.vector,
        space,
    })
}

/// Photon cutoffs sized to the variational field: `max(10, ⌈4 N_a r_s²⌉)`.
pub fn initial_cutoffs(model: &ModelSpec, atoms: usize) -> Result<Vec<usize>> {
    let ground = minimize_ground(model, &MinimizeOptions::default())?;
    Ok(ground
        .params
        .r
        .iter()
        .map(|r| ((4.0 * atoms as f64 * r * r).ceil() as usize).max(10))
        .collect())
}

/// Exact ground energy per atom, growing the cutoffs until they stop mattering.
///
/// With explicit `cutoffs` only one growth step is taken, to measure the shift.
/// When the next growth would exceed the cap the last result is returned
/// unconverged.
pub fn exact_ground(
    model: &ModelSpec,
    atoms: usize,
    cutoffs: Option<&[usize]>,
    opts: &ExactOptions,
) -> Result<ExactGround> {
    model.validate()?;
    if atoms == 0 {
        return Err(Error::InvalidInput("need at least one atom".into()));
    }
    let explicit = cutoffs.is_some();
    let mut current = match cutoffs {
        Some(c) if c.len() != model.modes.len() => {
            return Err(Error::InvalidInput(format!(
                "expected {} cutoffs, got {}",
                model.modes.len(),
                c.len()
            )))
        }
        Some(c) => c.to_vec(),
        None => initial_cutoffs(model, atoms)?,
    };
    let mut prev = solve(model, atoms, &current, opts.cap)?;
    let mut shift = f64::INFINITY;
    for _ in 0..opts.max_growths.max(1) {
        let next: Vec<usize> = current.iter().map(|c| c + opts.step).collect();
        if TruncatedSpace::dimension(model.levels, atoms, &next) > opts.cap {
            break;
        }
        let solved = solve(model, atoms, &next, opts.cap)?;
        shift = (solved.energy - prev.energy).abs();
        prev = solved;
        current = next;
        if shift < opts.tol || explicit {
            break;
        }
    }

    let ops = CollectiveOps::new(prev.space.basis.clone())?;
    let n = model.levels;
    let mut number_op = Matrix::zeros(prev.space.basis.dim());
    let mut casimir_op = Matrix::zeros(prev.space.basis.dim());
    for p in 0..n {
        number_op = number_op.add(ops.get(p, p));
        for q in 0..n {
            casimir_op = casimir_op.add(&ops.get(p, q).mul(ops.get(q, p)));
        }
    }
    let atom_number = prev
        .space
        .embed(0, &number_op.to_complex())
        .expectation(&prev.vector)
        .re;
    let casimir = prev
        .space
        .embed(0, &casimir_op.to_complex())
        .expectation(&prev.vector)
        .re;
    Ok(ExactGround {
        energy: prev.energy,
        cutoffs: current,
        dim: prev.dim,
        solver: prev.solver.to_string(),
        shift,
        converged: shift < opts.tol,
        atom_number,
        casimir,
    })
}

/// Variational versus exact energy per atom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(rename = "E_var")]
    pub e_var: f64,
    #[serde(rename = "E_exact")]
    pub e_exact: f64,
    /// `E_var − E_exact`; non-negative for a valid variational bound.
    pub gap: f64,
    pub cutoffs: Vec<usize>,
    pub converged: bool,
}

pub fn verdict(model: &ModelSpec, atoms: usize, opts: &ExactOptions) -> Result<Verdict> {
    let e_var = minimize_ground(model, &MinimizeOptions::default())?.energy;
    let exact = exact_ground(model, atoms, None, opts)?;
    Ok(Verdict {
        e_var,
        e_exact: exact.energy,
        gap: e_var - exact.energy,
        cutoffs: exact.cutoffs,
        converged: exact.converged,
    })
}

/// `|γ⟩^{⊗N_a}` written in the symmetric occupation basis.
pub fn coherent_matter_state(basis: &OccupationBasis, gamma: &[Complex64]) -> Result<Vec<Complex64>> {
    if gamma.len() != basis.levels() {
        return Err(Error::InvalidInput(format!(
            "expected {} amplitudes, got {}",
            basis.levels(),
            gamma.len()
        )));
    }
    let norm = gamma.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidInput("amplitudes vanish".into()));
    }
    let ln_fact = |n: u32| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
    let total = ln_fact(basis.atoms() as u32);
    Ok(basis
        .states()
        .iter()
        .map(|occ| {
            let weight = (0.5 * (total - occ.iter().map(|&n| ln_fact(n)).sum::<f64>())).exp();
            occ.iter()
                .zip(gamma)
                .fold(Complex64::new(weight, 0.0), |acc, (&n, g)| acc * (g / norm).powu(n))
        })
        .collect())
}
