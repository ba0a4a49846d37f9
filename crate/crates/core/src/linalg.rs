//! Square operator matrices that switch between dense and sparse storage.
//!
//! Small operators (dimension up to [`DENSE_MAX_DIM`]) are kept as dense
//! `nalgebra` matrices; larger ones use compressed sparse rows from `sprs`.
//! Binary operations fall back to sparse storage whenever either operand is
//! sparse.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use sprs::{CsMat, TriMat};

/// Largest dimension stored densely.
pub const DENSE_MAX_DIM: usize = 64;

pub trait Scalar: ComplexField<RealField = f64> + Copy + Default + num_traits::Num + Send + Sync + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Clone, Debug)]
pub enum Matrix<T: Scalar> {
    Dense(DMatrix<T>),
    Sparse(CsMat<T>),
}

impl<T: Scalar> Matrix<T> {
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut tri = TriMat::new((dim, dim));
        for (r, c, v) in entries {
            tri.add_triplet(r, c, v);
        }
        let csr: CsMat<T> = tri.to_csr();
        Self::from_sparse(csr)
    }

    fn from_sparse(m: CsMat<T>) -> Self {
        if m.rows() <= DENSE_MAX_DIM {
            Matrix::Dense(sparse_to_dense(&m))
        } else {
            Matrix::Sparse(m)
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, std::iter::empty())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, T::one())))
    }

    pub fn dim(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.nrows(),
            Matrix::Sparse(s) => s.rows(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Matrix::Dense(_))
    }

    fn to_sparse(&self) -> CsMat<T> {
        match self {
            Matrix::Sparse(s) => s.clone(),
            Matrix::Dense(d) => {
                let mut tri = TriMat::new((d.nrows(), d.ncols()));
                for c in 0..d.ncols() {
                    for r in 0..d.nrows() {
                        let v = d[(r, c)];
                        if v != T::zero() {
                            tri.add_triplet(r, c, v);
                        }
                    }
                }
                tri.to_csr()
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        match self {
            Matrix::Dense(d) => d.clone(),
            Matrix::Sparse(s) => sparse_to_dense(s),
        }
    }

    /// Element access; linear in the row length for sparse storage.
    pub fn get(&self, row: usize, col: usize) -> T {
        match self {
            Matrix::Dense(d) => d[(row, col)],
            Matrix::Sparse(s) => s.get(row, col).copied().unwrap_or_else(T::zero),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Matrix::Dense(a), Matrix::Dense(b)) => Matrix::Dense(a * b),
            _ => Self::from_sparse(sparse_mul(&self.to_sparse(), &other.to_sparse())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Matrix::Dense(a), Matrix::Dense(b)) => Matrix::Dense(a + b),
            _ => {
                let dim = self.dim();
                Self::from_triplets(dim, self.triplets().into_iter().chain(other.triplets()))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(<T as Scalar>::from_f64(-1.0)))
    }

    pub fn scale(&self, factor: T) -> Self {
        match self {
            Matrix::Dense(d) => Matrix::Dense(d * factor),
            Matrix::Sparse(s) => Matrix::Sparse(s.map(|&v| v * factor)),
        }
    }

    /// Accumulate `factor * other` into `self`.
    pub fn axpy(&mut self, factor: T, other: &Self) {
        *self = self.add(&other.scale(factor));
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Matrix::Dense(d) => Matrix::Dense(d.adjoint()),
            Matrix::Sparse(s) => {
                let t = s.transpose_view().to_csr();
                Matrix::Sparse(t.map(|v| v.conjugate()))
            }
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        match self {
            Matrix::Dense(d) => {
                for (r, out) in y.iter_mut().enumerate() {
                    let mut acc = T::zero();
                    for (c, xc) in x.iter().enumerate() {
                        acc += d[(r, c)] * *xc;
                    }
                    *out = acc;
                }
            }
            Matrix::Sparse(s) => {
                for (r, row) in s.outer_iterator().enumerate() {
                    let mut acc = T::zero();
                    for (c, v) in row.iter() {
                        acc += *v * x[c];
                    }
                    y[r] = acc;
                }
            }
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// Stored entries as (row, col, value).
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        match self {
            Matrix::Dense(d) => {
                let mut out = Vec::new();
                for r in 0..d.nrows() {
                    for c in 0..d.ncols() {
                        let v = d[(r, c)];
                        if v != T::zero() {
                            out.push((r, c, v));
                        }
                    }
                }
                out
            }
            Matrix::Sparse(s) => s.iter().map(|(v, (r, c))| (r, c, *v)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets()
            .into_iter()
            .map(|(_, _, v)| v.modulus())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        match self {
            Matrix::Dense(d) => Matrix::Dense(d.map(|v| v.to_complex())),
            Matrix::Sparse(s) => Matrix::Sparse(s.map(|v| v.to_complex())),
        }
    }

    /// Kronecker product `self ⊗ other`, always sparse unless tiny.
    pub fn kron(&self, other: &Self) -> Self {
        let nb = other.dim();
        let tb = other.triplets();
        let entries = self
            .triplets()
            .into_iter()
            .flat_map(|(ra, ca, va)| {
                tb.iter()
                    .map(move |&(rb, cb, vb)| (ra * nb + rb, ca * nb + cb, va * vb))
            })
            .collect::<Vec<_>>();
        Self::from_triplets(self.dim() * nb, entries)
    }

    /// Expectation value ⟨ψ|M|ψ⟩ for a normalised state.
    pub fn expectation(&self, psi: &[T]) -> T {
        let mpsi = self.matvec(psi);
        psi.iter()
            .zip(&mpsi)
            .fold(T::zero(), |acc, (a, b)| acc + a.conjugate() * *b)
    }
}

fn sparse_mul<T: Scalar>(a: &CsMat<T>, b: &CsMat<T>) -> CsMat<T> {
    let n = b.cols();
    let mut acc = vec![T::zero(); n];
    let mut touched = vec![false; n];
    let mut cols = Vec::new();
    let mut tri = TriMat::new((a.rows(), n));
    for (r, row) in a.outer_iterator().enumerate() {
        for (k, &va) in row.iter() {
            if let Some(brow) = b.outer_view(k) {
                for (c, &vb) in brow.iter() {
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    acc[c] += va * vb;
                }
            }
        }
        for &c in &cols {
            if acc[c] != T::zero() {
                tri.add_triplet(r, c, acc[c]);
            }
            acc[c] = T::zero();
            touched[c] = false;
        }
        cols.clear();
    }
    tri.to_csr()
}

fn sparse_to_dense<T: Scalar>(m: &CsMat<T>) -> DMatrix<T> {
    let mut d = DMatrix::from_element(m.rows(), m.cols(), T::zero());
    for (v, (r, c)) in m.iter() {
        d[(r, c)] += *v;
    }
    d
}
