//! Reduced energy surface on real matter amplitudes with the field eliminated.
//!
//! On a critical phase branch (`φ_k, θ_s ∈ {0, π}`) the matter state is a real
//! vector `c` with signs carrying the phases. Substituting the optimal field
//! amplitude for every mode gives
//!
//! `E(c) = Σ ω_k c_k²/N − Σ_s 4 S_s²/(Ω_s) + Q(c)/N²`, `S_s = Σ μ c_j c_k / N`,
//!
//! with `N = ‖c‖²` and `Q` the real quartic dipole-dipole form. `E` depends
//! only on the direction of `c`, so it is minimised over the unit sphere.

use std::collections::BTreeMap;

use crate::model::ModelSpec;

#[derive(Clone, Debug)]
struct ModeTerm {
    four_over_omega: f64,
    pairs: Vec<(usize, usize, f64)>,
}

/// Precompiled reduced surface of one model.
#[derive(Clone, Debug)]
pub struct ReducedSurface {
    levels: usize,
    omegas: Vec<f64>,
    modes: Vec<ModeTerm>,
    /// Monomials `c_a c_b c_c c_d` (sorted indices) with summed `½ Re g`.
    quartic: Vec<([usize; 4], f64)>,
    symmetries: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceEval {
    pub energy: f64,
    /// Cartesian gradient `∂E/∂c`.
    pub grad: Vec<f64>,
}

impl ReducedSurface {
    pub fn new(model: &ModelSpec) -> Self {
        let modes = model
            .mode_pairs()
            .into_iter()
            .zip(&model.modes)
            .filter(|(pairs, _)| !pairs.is_empty())
            .map(|(pairs, &omega)| ModeTerm {
                four_over_omega: 4.0 / omega,
                pairs,
            })
            .collect();
        let mut quartic: BTreeMap<[usize; 4], f64> = BTreeMap::new();
        for (idx, g) in model.gtable.iter() {
            if g.re == 0.0 {
                continue;
            }
            let mut key = *idx;
            key.sort_unstable();
            *quartic.entry(key).or_default() += 0.5 * g.re;
        }
        let quartic: Vec<_> = quartic.into_iter().filter(|(_, v)| *v != 0.0).collect();
        let mut surface = Self {
            levels: model.levels,
            omegas: model.omegas.clone(),
            modes,
            quartic,
            symmetries: Vec::new(),
        };
        surface.symmetries = surface.find_symmetries();
        surface
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Sign patterns `ε` (including the global flip) leaving `E` invariant term by term.
    fn find_symmetries(&self) -> Vec<Vec<f64>> {
        let n = self.levels;
        let mut out = Vec::new();
        for bits in 0u32..(1 << n) {
            let eps: Vec<f64> = (0..n).map(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let modes_ok = self.modes.iter().all(|m| {
                let first = m.pairs.first().map_or(1.0, |&(j, k, _)| eps[j] * eps[k]);
                m.pairs.iter().all(|&(j, k, _)| eps[j] * eps[k] == first)
            });
            let quartic_ok = self
                .quartic
                .iter()
                .all(|(idx, _)| idx.iter().map(|&i| eps[i]).product::<f64>() == 1.0);
            if modes_ok && quartic_ok {
                out.push(eps);
            }
        }
        out
    }

    /// Normalised mode overlaps `S_s = Σ μ c_j c_k / N`, one per driven mode,
    /// in model mode order (undriven modes give 0).
    pub fn mode_overlaps(&self, model: &ModelSpec, c: &[f64]) -> Vec<f64> {
        let n2: f64 = c.iter().map(|v| v * v).sum();
        let mut out = vec![0.0; model.modes.len()];
        for cp in model.couplings.iter().filter(|cp| cp.mu != 0.0) {
            out[cp.mode] += cp.mu * c[cp.lower] * c[cp.upper] / n2;
        }
        out
    }

    pub fn energy(&self, c: &[f64]) -> f64 {
        let n2: f64 = c.iter().map(|v| v * v).sum();
        let bare: f64 = self.omegas.iter().zip(c).map(|(w, v)| w * v * v).sum();
        let mut e = bare / n2;
        for m in &self.modes {
            let s: f64 = m.pairs.iter().map(|&(j, k, mu)| mu * c[j] * c[k]).sum::<f64>() / n2;
            e -= m.four_over_omega * s * s;
        }
        let q: f64 = self
            .quartic
            .iter()
            .map(|([a, b, cc, d], v)| v * c[*a] * c[*b] * c[*cc] * c[*d])
            .sum();
        e + q / (n2 * n2)
    }

    pub fn eval(&self, c: &[f64]) -> SurfaceEval {
        let n = c.len();
        let n2: f64 = c.iter().map(|v| v * v).sum();
        let mut grad = vec![0.0; n];

        let bare: f64 = self.omegas.iter().zip(c).map(|(w, v)| w * v * v).sum::<f64>() / n2;
        for a in 0..n {
            grad[a] += 2.0 * (self.omegas[a] - bare) * c[a] / n2;
        }
        let mut e = bare;

        for m in &self.modes {
            let s: f64 = m.pairs.iter().map(|&(j, k, mu)| mu * c[j] * c[k]).sum::<f64>() / n2;
            e -= m.four_over_omega * s * s;
            let w = -2.0 * m.four_over_omega * s / n2;
            for &(j, k, mu) in &m.pairs {
                grad[j] += w * mu * c[k];
                grad[k] += w * mu * c[j];
            }
            for a in 0..n {
                grad[a] -= w * 2.0 * s * c[a];
            }
        }

        let n4 = n2 * n2;
        let mut q = 0.0;
        for ([a, b, cc, d], v) in &self.quartic {
            let (a, b, cc, d) = (*a, *b, *cc, *d);
            q += v * c[a] * c[b] * c[cc] * c[d];
            grad[a] += v * c[b] * c[cc] * c[d] / n4;
            grad[b] += v * c[a] * c[cc] * c[d] / n4;
            grad[cc] += v * c[a] * c[b] * c[d] / n4;
            grad[d] += v * c[a] * c[b] * c[cc] / n4;
        }
        let q = q / n4;
        for a in 0..n {
            grad[a] -= 4.0 * q * c[a] / n2;
        }
        SurfaceEval { energy: e + q, grad }
    }

    /// Representative of `c` under the sign symmetries of the surface: the image
    /// whose sign pattern (entries below `tol` counted as zero) is largest
    /// lexicographically, so positive leading components.
    pub fn canonical(&self, c: &[f64], tol: f64) -> Vec<f64> {
        let key = |v: &[f64]| -> Vec<i8> {
            v.iter()
                .map(|&x| {
                    if x > tol {
                        1
                    } else if x < -tol {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        };
        let mut best = c.to_vec();
        let mut best_key = key(&best);
        for eps in &self.symmetries {
            let img: Vec<f64> = c.iter().zip(eps).map(|(v, e)| v * e).collect();
            let k = key(&img);
            if k > best_key {
                best_key = k;
                best = img;
            }
        }
        best
    }
}

/// Hyperspherical chart of the unit sphere in `R^n`:
/// `c_0 = cos a_1`, `c_1 = sin a_1 cos a_2`, …, `c_{n-1} = sin a_1 ⋯ sin a_{n-1}`.
#[derive(Clone, Copy, Debug)]
pub struct SphereChart {
    pub dim: usize,
}

impl SphereChart {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    fn component(&self, a: &[f64], i: usize, diff: Option<usize>) -> f64 {
        let n = self.dim;
        let upto = if i == n - 1 { n - 1 } else { i + 1 };
        if let Some(t) = diff {
            if t >= upto {
                return 0.0;
            }
        }
        // Angle a_{t+1} is stored at a[t].
        let mut v = 1.0;
        for t in 0..upto {
            v *= Self::factor(a, i, t, n, diff);
        }
        v
    }

    fn factor(a: &[f64], i: usize, t: usize, n: usize, diff: Option<usize>) -> f64 {
        // Component i uses angles a[0..i] as sines and a[i] as cosine (if i < n-1).
        let angle = a[t];
        let is_cos = t == i && i != n - 1;
        match (diff == Some(t), is_cos) {
            (false, false) => angle.sin(),
            (false, true) => angle.cos(),
            (true, false) => angle.cos(),
            (true, true) => -angle.sin(),
        }
    }

    pub fn to_cart(&self, a: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.component(a, i, None)).collect()
    }

    /// `∂c_i/∂a_t` as rows over `i`.
    pub fn jacobian(&self, a: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim - 1).map(|t| self.component(a, i, Some(t))).collect())
            .collect()
    }

    /// Chart gradient from a Cartesian gradient.
    pub fn pull_back(&self, a: &[f64], grad_c: &[f64]) -> Vec<f64> {
        let jac = self.jacobian(a);
        (0..self.dim - 1)
            .map(|t| (0..self.dim).map(|i| grad_c[i] * jac[i][t]).sum())
            .collect()
    }

    /// Angles of a non-zero vector (normalised internally).
    pub fn from_cart(&self, c: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n - 1];
        for t in 0..n - 1 {
            let tail: f64 = c[t + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            a[t] = if t == n - 2 {
                c[n - 1].atan2(c[n - 2])
            } else {
                tail.atan2(c[t])
            };
        }
        a
    }
}
