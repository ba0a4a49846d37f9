//! Collective U(n) matter operators in the totally symmetric N_a-atom sector.
//!
//! States are occupation vectors `(n_1, …, n_n)` with `Σ n_k = N_a`, i.e. the
//! bosonic realisation `A_jk = b_j† b_k`. Level indices are zero-based
//! throughout the crate (`0` is the lowest level).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Default cap on the symmetric-basis dimension.
pub const DEFAULT_MAX_DIM: usize = 200_000;

#[derive(Clone, Debug)]
pub struct OccupationBasis {
    levels: usize,
    atoms: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

/// Number of symmetric states, `binomial(N_a + n - 1, n - 1)`, saturating.
pub fn symmetric_dimension(levels: usize, atoms: usize) -> usize {
    let k = levels.saturating_sub(1) as u128;
    let top = (atoms as u128) + k;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (top - i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

impl OccupationBasis {
    pub fn enumerate(levels: usize, atoms: usize) -> Result<Self> {
        Self::enumerate_capped(levels, atoms, DEFAULT_MAX_DIM)
    }

    /// Occupation vectors in lexicographically descending order.
    pub fn enumerate_capped(levels: usize, atoms: usize, cap: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 levels, got {levels}")));
        }
        if atoms < 1 {
            return Err(Error::InvalidInput("need at least one atom".into()));
        }
        let dim = symmetric_dimension(levels, atoms);
        if dim > cap {
            return Err(Error::Sizing { dim, cap });
        }
        let mut states = Vec::with_capacity(dim);
        let mut current = vec![0u32; levels];
        fill(&mut states, &mut current, 0, atoms as u32);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self {
            levels,
            atoms,
            states,
            index,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn position(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    fn check_level(&self, index: usize) -> Result<()> {
        if index >= self.levels {
            return Err(Error::LevelOutOfRange {
                index,
                levels: self.levels,
            });
        }
        Ok(())
    }
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.to_vec());
        return;
    }
    for n in (0..=remaining).rev() {
        current[pos] = n;
        fill(out, current, pos + 1, remaining - n);
    }
    current[pos] = 0;
}

/// `A_jk = b_j† b_k` on a symmetric basis.
#[derive(Clone, Debug)]
pub struct CollectiveOp {
    pub j: usize,
    pub k: usize,
    levels: usize,
    atoms: usize,
    pub matrix: Matrix<f64>,
}

impl CollectiveOp {
    pub fn new(j: usize, k: usize, basis: &OccupationBasis) -> Result<Self> {
        basis.check_level(j)?;
        basis.check_level(k)?;
        let entries = basis.states().iter().enumerate().filter_map(|(col, state)| {
            if j == k {
                return Some((col, col, state[j] as f64));
            }
            if state[k] == 0 {
                return None;
            }
            let mut target = state.clone();
            let amp = ((state[j] + 1) as f64).sqrt() * (state[k] as f64).sqrt();
            target[j] += 1;
            target[k] -= 1;
            basis.position(&target).map(|row| (row, col, amp))
        });
        let matrix = Matrix::from_triplets(basis.dim(), entries);
        Ok(Self {
            j,
            k,
            levels: basis.levels(),
            atoms: basis.atoms(),
            matrix,
        })
    }

    fn on(&self, basis: &OccupationBasis) -> bool {
        self.levels == basis.levels() && self.atoms == basis.atoms()
    }
}

/// All `n²` collective operators of one basis, built once.
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    basis: OccupationBasis,
    ops: Vec<Vec<CollectiveOp>>,
}

impl CollectiveOps {
    pub fn new(basis: OccupationBasis) -> Result<Self> {
        let n = basis.levels();
        let mut ops = Vec::with_capacity(n);
        for j in 0..n {
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                row.push(CollectiveOp::new(j, k, &basis)?);
            }
            ops.push(row);
        }
        Ok(Self { basis, ops })
    }

    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    pub fn get(&self, j: usize, k: usize) -> &Matrix<f64> {
        &self.ops[j][k].matrix
    }

    pub fn op(&self, j: usize, k: usize) -> &CollectiveOp {
        &self.ops[j][k]
    }

    /// `A_pq ⊘ A_rs` from cached matrices.
    pub fn oslash(&self, p: usize, q: usize, r: usize, s: usize) -> Matrix<f64> {
        let prod = self.get(p, q).mul(self.get(r, s));
        if q == r {
            prod.sub(self.get(p, s))
        } else {
            prod
        }
    }
}

/// Product without self-interaction: `A_pq A_rs − δ_qr A_ps`.
pub fn oslash(a: &CollectiveOp, b: &CollectiveOp, basis: &OccupationBasis) -> Result<Matrix<f64>> {
    if !a.on(basis) || !b.on(basis) {
        return Err(Error::BasisMismatch);
    }
    let prod = a.matrix.mul(&b.matrix);
    if a.k == b.j {
        let self_term = CollectiveOp::new(a.j, b.k, basis)?;
        Ok(prod.sub(&self_term.matrix))
    } else {
        Ok(prod)
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SelftestReport {
    pub levels: usize,
    pub atoms: usize,
    pub checks: Vec<IdentityCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Check the U(n) commutators, both Casimirs and `O_pqrs = 0` numerically.
pub fn algebra_selftest(levels: usize, atoms: usize, tol: f64) -> Result<SelftestReport> {
    let ops = CollectiveOps::new(OccupationBasis::enumerate(levels, atoms)?)?;
    let n = levels;
    let dim = ops.basis().dim();
    let identity = Matrix::<f64>::identity(dim);

    let mut commutator_dev: f64 = 0.0;
    let mut o_dev: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let a = ops.get(p, q);
                    let b = ops.get(r, s);
                    let lhs = a.mul(b).sub(&b.mul(a));
                    let mut rhs = Matrix::zeros(dim);
                    if q == r {
                        rhs.axpy(1.0, ops.get(p, s));
                    }
                    if p == s {
                        rhs.axpy(-1.0, ops.get(r, q));
                    }
                    commutator_dev = commutator_dev.max(lhs.max_abs_diff(&rhs));

                    let o = ops.oslash(p, q, r, s).sub(&ops.oslash(p, s, r, q));
                    o_dev = o_dev.max(o.max_abs());
                }
            }
        }
    }

    let mut number = Matrix::zeros(dim);
    for q in 0..n {
        number.axpy(1.0, ops.get(q, q));
    }
    let number_dev = number.max_abs_diff(&identity.scale(atoms as f64));

    let mut casimir = Matrix::zeros(dim);
    for j in 0..n {
        for k in 0..n {
            casimir = casimir.add(&ops.get(k, j).mul(ops.get(j, k)));
        }
    }
    let c2 = (atoms * (atoms + n - 1)) as f64;
    let casimir_dev = casimir.max_abs_diff(&identity.scale(c2));

    let check = |name, max_deviation: f64| IdentityCheck {
        name,
        max_deviation,
        passed: max_deviation <= tol,
    };
    Ok(SelftestReport {
        levels,
        atoms,
        checks: vec![
            check("commutator", commutator_dev),
            check("casimir-1", number_dev),
            check("casimir-2", casimir_dev),
            check("o-pqrs", o_dev),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_dimensions() {
        assert_eq!(OccupationBasis::enumerate(2, 1).unwrap().dim(), 2);
        assert_eq!(OccupationBasis::enumerate(3, 2).unwrap().dim(), 6);
        assert_eq!(OccupationBasis::enumerate(2, 5).unwrap().dim(), 6);
    }

    #[test]
    fn basis_order_is_lexicographic_descending() {
        let b = OccupationBasis::enumerate(3, 2).unwrap();
        let expect: Vec<Vec<u32>> = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 2, 0],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        assert_eq!(b.states(), expect.as_slice());
        assert!(b.states().iter().all(|s| s.iter().sum::<u32>() == 2));
    }

    #[test]
    fn basis_rejects_bad_sizes() {
        assert!(OccupationBasis::enumerate(1, 3).is_err());
        assert!(OccupationBasis::enumerate(3, 0).is_err());
        let err = OccupationBasis::enumerate_capped(4, 100, 1000).unwrap_err();
        assert!(matches!(
            err,
            Error::Sizing {
                dim: 176_851,
                cap: 1000
            }
        ));
    }

    #[test]
    fn number_operator_diagonal() {
        let b = OccupationBasis::enumerate(2, 3).unwrap();
        let a11 = CollectiveOp::new(0, 0, &b).unwrap();
        assert_eq!(a11.matrix.diagonal(), vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn single_atom_raising() {
        let b = OccupationBasis::enumerate(2, 1).unwrap();
        let a12 = CollectiveOp::new(0, 1, &b).unwrap();
        // |1,0⟩ is index 0, |0,1⟩ index 1; A_12 moves the atom down into level 1.
        assert_eq!(a12.matrix.triplets(), vec![(0, 1, 1.0)]);
    }

    #[test]
    fn out_of_range_levels() {
        let b = OccupationBasis::enumerate(2, 1).unwrap();
        assert!(matches!(
            CollectiveOp::new(0, 2, &b),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn number_operators_sum_to_atom_count() {
        let b = OccupationBasis::enumerate(3, 4).unwrap();
        let ops = CollectiveOps::new(b).unwrap();
        let mut sum = Matrix::zeros(ops.basis().dim());
        for q in 0..3 {
            sum.axpy(1.0, ops.get(q, q));
        }
        assert_eq!(sum.max_abs_diff(&Matrix::identity(ops.basis().dim()).scale(4.0)), 0.0);
    }

    #[test]
    fn transpose_pairs() {
        let ops = CollectiveOps::new(OccupationBasis::enumerate(3, 3).unwrap()).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(ops.get(k, j).max_abs_diff(&ops.get(j, k).adjoint()), 0.0);
            }
        }
    }

    #[test]
    fn oslash_single_atom_vanishes() {
        let b = OccupationBasis::enumerate(2, 1).unwrap();
        let a12 = CollectiveOp::new(0, 1, &b).unwrap();
        let a21 = CollectiveOp::new(1, 0, &b).unwrap();
        assert_eq!(oslash(&a12, &a21, &b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn oslash_two_atoms_trace() {
        // Basis |2,0⟩,|1,1⟩,|0,2⟩. A_12 A_21 = diag(2·1, 1·2, 0) by hand, A_11 = diag(2,1,0);
        // the difference is diag(0,1,0) with trace 1.
        let b = OccupationBasis::enumerate(2, 2).unwrap();
        let a12 = CollectiveOp::new(0, 1, &b).unwrap();
        let a21 = CollectiveOp::new(1, 0, &b).unwrap();
        let m = oslash(&a12, &a21, &b).unwrap();
        for (got, want) in m.diagonal().into_iter().zip([0.0, 1.0, 0.0]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn oslash_basis_mismatch() {
        let b1 = OccupationBasis::enumerate(2, 2).unwrap();
        let b2 = OccupationBasis::enumerate(2, 3).unwrap();
        let a = CollectiveOp::new(0, 1, &b1).unwrap();
        let c = CollectiveOp::new(1, 0, &b2).unwrap();
        assert!(matches!(oslash(&a, &c, &b1), Err(Error::BasisMismatch)));
    }

    #[test]
    fn selftest_examples() {
        let r = algebra_selftest(4, 1, 0.0).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
        assert!(r.checks.iter().all(|c| c.max_deviation == 0.0));
        // Casimir-2 eigenvalue 12 for (n=2, N=3) and 8 for (n=3, N=2) is what the check compares against.
        assert!(algebra_selftest(2, 3, 1e-12).unwrap().passed());
        assert!(algebra_selftest(3, 2, 1e-12).unwrap().passed());
    }

    #[test]
    fn population_shift() {
        let b = OccupationBasis::enumerate(3, 3).unwrap();
        let a02 = CollectiveOp::new(0, 2, &b).unwrap();
        for (row, col, _) in a02.matrix.triplets() {
            let from = &b.states()[col];
            let to = &b.states()[row];
            assert_eq!(to[0], from[0] + 1);
            assert_eq!(to[2] + 1, from[2]);
            assert_eq!(to[1], from[1]);
        }
    }
}
