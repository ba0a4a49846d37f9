use std::collections::BTreeMap;

use num_complex::Complex64;

use super::ModelSpec;
use crate::algebra::CollectiveOps;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

type CMatrix = Matrix<Complex64>;

/// Dipole-dipole Hamiltonian split by the number of distinct levels involved.
///
/// Keys are zero-based: `two[(j, k)]` with `j < k`; `three[(j, k, l)]` with the
/// shared level `k` in the middle and `j < l`; `four[[j, k, l, m]]` sorted.
/// Each stored term is the symmetrised (hermitian) combination of the ordered
/// `W` operators carrying that index set.
#[derive(Clone, Debug)]
pub struct HddMatrices {
    pub atoms: usize,
    pub two: BTreeMap<(usize, usize), CMatrix>,
    pub three: BTreeMap<(usize, usize, usize), CMatrix>,
    pub four: BTreeMap<[usize; 4], CMatrix>,
    pub total: CMatrix,
}

struct Ops {
    a: Vec<Vec<CMatrix>>,
}

impl Ops {
    fn new(ops: &CollectiveOps) -> Self {
        let n = ops.basis().levels();
        let a = (0..n)
            .map(|j| (0..n).map(|k| ops.get(j, k).to_complex()).collect())
            .collect();
        Self { a }
    }

    fn get(&self, j: usize, k: usize) -> &CMatrix {
        &self.a[j][k]
    }

    fn prod(&self, p: usize, q: usize, r: usize, s: usize) -> CMatrix {
        self.a[p][q].mul(&self.a[r][s])
    }
}

fn check_support(model: &ModelSpec, ops: &CollectiveOps) -> Result<()> {
    if ops.basis().levels() != model.levels {
        return Err(Error::BasisMismatch);
    }
    let bad: Vec<_> = model
        .gtable
        .iter()
        .filter(|(idx, v)| v.norm() != 0.0 && (!model.serves(idx[0], idx[1]) || !model.serves(idx[2], idx[3])))
        .map(|(idx, _)| *idx)
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::GTable(bad))
    }
}

/// Ordered 2-level term `W_jk`.
fn w2(ops: &Ops, g: &dyn Fn(usize, usize, usize, usize) -> Complex64, c: f64, j: usize, k: usize) -> CMatrix {
    let half = Complex64::new(c / 2.0, 0.0);
    let full = Complex64::new(c, 0.0);
    let mut w = ops.prod(j, k, j, k).scale(g(j, k, j, k) * half);
    w.axpy(g(k, j, k, j) * half, &ops.prod(k, j, k, j));
    w.axpy(g(j, k, k, j) * full, &ops.prod(j, k, k, j).sub(ops.get(j, j)));
    w
}

/// Ordered 3-level term `W_jkl` with `k` the shared level.
fn w3(ops: &Ops, g: &dyn Fn(usize, usize, usize, usize) -> Complex64, c: f64, j: usize, k: usize, l: usize) -> CMatrix {
    let half = Complex64::new(c / 2.0, 0.0);
    let full = Complex64::new(c, 0.0);
    let anti = |p, q, r, s| ops.prod(p, q, r, s).add(&ops.prod(r, s, p, q));
    let mut w = anti(j, k, l, k).scale(g(j, k, l, k) * half);
    w.axpy(g(k, j, k, l) * half, &anti(k, j, k, l));
    w.axpy(g(j, k, k, l) * full, &ops.prod(j, k, k, l).sub(ops.get(j, l)));
    // A_kj A_lk carries no self-interaction for j ≠ l.
    w.axpy(g(k, j, l, k) * full, &ops.prod(k, j, l, k));
    w
}

/// 4-level term `W_jklm`: every unordered pair of disjoint transitions once.
fn w4(ops: &Ops, g: &dyn Fn(usize, usize, usize, usize) -> Complex64, c: f64, [j, k, l, m]: [usize; 4]) -> CMatrix {
    let terms = [
        [j, k, l, m],
        [j, k, m, l],
        [j, l, k, m],
        [j, l, m, k],
        [j, m, k, l],
        [j, m, l, k],
        [k, j, l, m],
        [k, j, m, l],
        [k, l, m, j],
        [k, m, l, j],
        [l, j, m, k],
        [l, k, m, j],
    ];
    let dim = ops.get(0, 0).dim();
    let mut w = Matrix::zeros(dim);
    for [p, q, r, s] in terms {
        let v = g(p, q, r, s);
        if v.norm() != 0.0 {
            w.axpy(v * c, &ops.prod(p, q, r, s));
        }
    }
    w
}

/// Assemble `H_dd` from its 2-, 3- and 4-level pieces.
///
/// With a single atom there is no pair interaction and `H_dd = 0`.
pub fn assemble_hdd(model: &ModelSpec, collective: &CollectiveOps) -> Result<HddMatrices> {
    check_support(model, collective)?;
    let atoms = collective.basis().atoms();
    let dim = collective.basis().dim();
    let mut out = HddMatrices {
        atoms,
        two: BTreeMap::new(),
        three: BTreeMap::new(),
        four: BTreeMap::new(),
        total: Matrix::zeros(dim),
    };
    if atoms < 2 || model.gtable.is_zero() {
        return Ok(out);
    }
    let n = model.levels;
    let c = 1.0 / (atoms as f64 - 1.0);
    let ops = Ops::new(collective);
    let table = &model.gtable;
    let g = |a, b, cc, d| table.get(a, b, cc, d);
    let nonzero = |idx: &[[usize; 4]]| idx.iter().any(|i| g(i[0], i[1], i[2], i[3]).norm() != 0.0);
    let half = Complex64::new(0.5, 0.0);

    for j in 0..n {
        for k in j + 1..n {
            if !nonzero(&[[j, k, j, k], [k, j, k, j], [j, k, k, j], [k, j, j, k]]) {
                continue;
            }
            let term = w2(&ops, &g, c, j, k).add(&w2(&ops, &g, c, k, j)).scale(half);
            out.total = out.total.add(&term);
            out.two.insert((j, k), term);
        }
    }

    for k in 0..n {
        for j in 0..n {
            for l in j + 1..n {
                if j == k || l == k {
                    continue;
                }
                let idx = [
                    [j, k, l, k],
                    [k, j, k, l],
                    [j, k, k, l],
                    [k, j, l, k],
                    [l, k, j, k],
                    [k, l, k, j],
                    [l, k, k, j],
                    [k, l, j, k],
                ];
                if !nonzero(&idx) {
                    continue;
                }
                let term = w3(&ops, &g, c, j, k, l).add(&w3(&ops, &g, c, l, k, j)).scale(half);
                out.total = out.total.add(&term);
                out.three.insert((j, k, l), term);
            }
        }
    }

    for j in 0..n {
        for k in j + 1..n {
            for l in k + 1..n {
                for m in l + 1..n {
                    let term = w4(&ops, &g, c, [j, k, l, m]);
                    if term.max_abs() == 0.0 {
                        continue;
                    }
                    out.total = out.total.add(&term);
                    out.four.insert([j, k, l, m], term);
                }
            }
        }
    }
    Ok(out)
}

/// `H_dd = 1/(2(N_a−1)) Σ g_jklm A_jk ⊘ A_lm` summed entry by entry.
pub fn hdd_double_sum(model: &ModelSpec, collective: &CollectiveOps) -> Result<CMatrix> {
    check_support(model, collective)?;
    let atoms = collective.basis().atoms();
    let dim = collective.basis().dim();
    let mut total = Matrix::zeros(dim);
    if atoms < 2 {
        return Ok(total);
    }
    let c = 0.5 / (atoms as f64 - 1.0);
    for (&[j, k, l, m], &v) in model.gtable.iter() {
        if v.norm() == 0.0 {
            continue;
        }
        let term = collective.oslash(j, k, l, m).to_complex();
        total.axpy(v * c, &term);
    }
    Ok(total)
}
