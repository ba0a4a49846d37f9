//! Lowest eigenpair of a hermitian matrix, by dense diagonalisation or Lanczos.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Largest dimension handed to the dense solver by [`select_eigensolver`].
pub const DENSE_EIGEN_MAX_DIM: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    /// `‖H v − λ v‖`.
    pub residual: f64,
}

pub trait Eigensolver: Send + Sync {
    fn name(&self) -> &'static str;
    /// Whether this solver is the preferred choice at the given dimension.
    fn suits(&self, dim: usize) -> bool;
    fn lowest(&self, h: &Matrix<Complex64>) -> Result<Eigenpair>;
}

pub struct DenseSolver;

impl Eigensolver for DenseSolver {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn suits(&self, dim: usize) -> bool {
        dim <= DENSE_EIGEN_MAX_DIM
    }

    fn lowest(&self, h: &Matrix<Complex64>) -> Result<Eigenpair> {
        let dense: DMatrix<Complex64> = h.to_dense();
        let eig = SymmetricEigen::new(dense);
        let (idx, &value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::Numeric("empty matrix".into()))?;
        let vector: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let residual = residual(h, value, &vector);
        Ok(Eigenpair {
            value,
            vector,
            residual,
        })
    }
}

/// Restarted Lanczos with full reorthogonalisation against the current Krylov basis.
pub struct LanczosSolver {
    pub krylov: usize,
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosSolver {
    fn default() -> Self {
        Self {
            krylov: 80,
            restarts: 60,
            tol: 1e-10,
            seed: 7,
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(h: &Matrix<Complex64>, value: f64, v: &[Complex64]) -> f64 {
    let hv = h.matvec(v);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * value).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Smallest eigenpair of the real symmetric tridiagonal matrix.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    (value, eig.eigenvectors.column(idx).iter().copied().collect())
}

impl Eigensolver for LanczosSolver {
    fn name(&self) -> &'static str {
        "lanczos"
    }

    fn suits(&self, dim: usize) -> bool {
        dim > DENSE_EIGEN_MAX_DIM
    }

    fn lowest(&self, h: &Matrix<Complex64>) -> Result<Eigenpair> {
        let dim = h.dim();
        if dim == 0 {
            return Err(Error::Numeric("empty matrix".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut start: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0)).collect();
        let n0 = norm(&start);
        start.iter_mut().for_each(|x| *x /= n0);

        let krylov = self.krylov.min(dim).max(1);
        let mut best: Option<Eigenpair> = None;
        for _ in 0..self.restarts {
            let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
            let mut alpha = Vec::with_capacity(krylov);
            let mut beta: Vec<f64> = Vec::with_capacity(krylov);
            let mut w = vec![Complex64::default(); dim];
            for j in 0..krylov {
                h.matvec_into(&basis[j], &mut w);
                alpha.push(dot(&basis[j], &w).re);
                for _ in 0..2 {
                    for v in &basis {
                        let c = dot(v, &w);
                        w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                    }
                }
                let b = norm(&w);
                if j + 1 == krylov || b < 1e-13 {
                    break;
                }
                beta.push(b);
                basis.push(w.iter().map(|x| x / b).collect());
            }
            let (value, s) = tridiagonal_lowest(&alpha, &beta);
            let mut ritz = vec![Complex64::default(); dim];
            for (v, &c) in basis.iter().zip(&s) {
                ritz.iter_mut().zip(v).for_each(|(x, y)| *x += y * c);
            }
            let nr = norm(&ritz);
            ritz.iter_mut().for_each(|x| *x /= nr);
            let res = residual(h, value, &ritz);
            let done = res < self.tol * value.abs().max(1.0);
            start = ritz.clone();
            best = Some(Eigenpair {
                value,
                vector: ritz,
                residual: res,
            });
            if done || basis.len() == dim {
                break;
            }
        }
        let pair = best.expect("at least one restart");
        if pair.residual > 1e-6 * pair.value.abs().max(1.0) {
            return Err(Error::Numeric(format!(
                "Lanczos stalled with residual {:e}",
                pair.residual
            )));
        }
        Ok(pair)
    }
}

pub fn eigensolvers() -> Vec<Box<dyn Eigensolver>> {
    vec![Box::new(DenseSolver), Box::new(LanczosSolver::default())]
}

pub fn eigensolver(name: &str) -> Option<Box<dyn Eigensolver>> {
    eigensolvers().into_iter().find(|s| s.name() == name)
}

/// The registered solver preferred at this dimension.
pub fn select_eigensolver(dim: usize) -> Box<dyn Eigensolver> {
    eigensolvers()
        .into_iter()
        .find(|s| s.suits(dim))
        .expect("the registry covers every dimension")
}
