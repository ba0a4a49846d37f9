use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::surface::{ReducedSurface, SphereChart};
use super::CoherentParams;
use crate::error::Result;
use crate::model::ModelSpec;

/// Energies this close to zero count as the normal state.
pub const NORMAL_ETA: f64 = 1e-10;
/// Energies within this window are considered degenerate.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub starts_per_branch: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Extra starting directions (e.g. a neighbouring solution). They only add
    /// candidates; the cold multistart set is always run.
    pub hints: Vec<Vec<f64>>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            starts_per_branch: 8,
            tol: 1e-10,
            max_iter: 500,
            seed: 0,
            hints: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Normal,
    Collective,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundSolution {
    /// Parameters with `φ_k, θ_s ∈ {0, π}` and `r` at its critical value.
    pub params: CoherentParams,
    /// Unit real matter vector `γ/‖γ‖` in canonical sign form.
    pub amplitudes: Vec<f64>,
    /// Normalised mode overlaps `S_s`; `r_s = 2|S_s|/Ω_s`.
    pub overlaps: Vec<f64>,
    pub energy: f64,
    pub region: Region,
    /// Another, inequivalent minimiser lies within the tie window.
    pub tie: bool,
    pub grad_norm: f64,
    pub converged: bool,
}

impl GroundSolution {
    pub fn is_normal(&self) -> bool {
        self.region == Region::Normal
    }

    /// Populations `|γ_k|²/‖γ‖²`.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c * c).collect()
    }
}

struct Descent {
    x: Vec<f64>,
    f: f64,
    gnorm: f64,
    converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Quasi-Newton descent with an inverse-Hessian BFGS update and backtracking
/// Armijo steps.
fn bfgs(fg: &dyn Fn(&[f64]) -> (f64, Vec<f64>), x0: Vec<f64>, tol: f64, max_iter: usize) -> Descent {
    const MAX_STEP: f64 = 0.5;
    const NOISE_FLOOR: f64 = 1e-7;
    let n = x0.len();
    let mut x = x0;
    let (mut f, mut g) = fg(&x);
    let mut h = identity(n);
    for _ in 0..max_iter {
        let gnorm = norm(&g);
        if gnorm <= tol {
            return Descent {
                x,
                f,
                gnorm,
                converged: true,
            };
        }
        let mut p: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h[i][j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let plen = norm(&p);
        let mut step = if plen > MAX_STEP { MAX_STEP / plen } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let (fn_, gn) = fg(&xn);
            // Once the decrease drops below rounding, a smaller gradient is progress.
            let flat = (fn_ - f).abs() <= 1e-14 * f.abs().max(1.0) && norm(&gn) < gnorm;
            if fn_ <= f + 1e-4 * step * slope || flat {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            return Descent {
                x,
                f,
                gnorm,
                converged: gnorm <= NOISE_FLOOR,
            };
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-14 * norm(&s) * norm(&y) {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
        }
        let stalled = (f - fn_).abs() <= f64::EPSILON * f.abs().max(1e-300) && norm(&s) < 1e-15;
        x = xn;
        f = fn_;
        g = gn;
        if stalled {
            let gnorm = norm(&g);
            return Descent {
                x,
                f,
                gnorm,
                converged: gnorm <= NOISE_FLOOR,
            };
        }
    }
    let gnorm = norm(&g);
    Descent {
        x,
        f,
        gnorm,
        converged: gnorm <= tol,
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn normalise(mut c: Vec<f64>) -> Vec<f64> {
    let n = norm(&c);
    c.iter_mut().for_each(|v| *v /= n);
    c
}

/// Starting directions for one sign orthant of `(c_1, …, c_{n-1})`.
fn orthant_starts(model: &ModelSpec, signs: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = model.levels;
    let with_signs = |mags: Vec<f64>| -> Vec<f64> { normalise(mags.iter().zip(signs).map(|(m, s)| m * s).collect()) };
    let mut starts = Vec::with_capacity(count);
    let mut near_normal = vec![1e-3; n];
    near_normal[0] = 1.0;
    starts.push(with_signs(near_normal));

    // Bare 2-level optimum of each driven transition, population split t : 1−t.
    for c in model.couplings.iter().filter(|c| c.mu != 0.0) {
        if starts.len() >= count {
            break;
        }
        let gap = model.omegas[c.upper] - model.omegas[c.lower];
        let mu_c = 0.5 * (model.modes[c.mode] * gap).sqrt();
        let x2 = (c.mu / mu_c).powi(2);
        if x2 <= 1.0 {
            continue;
        }
        let t = (x2 - 1.0) / (2.0 * x2);
        let mut mags = vec![1e-3; n];
        mags[c.lower] = (1.0 - t).sqrt();
        mags[c.upper] = t.sqrt();
        starts.push(with_signs(mags));
    }
    while starts.len() < count {
        let mags: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
        starts.push(with_signs(mags));
    }
    starts
}

struct Candidate {
    c: Vec<f64>,
    energy: f64,
    gnorm: f64,
    converged: bool,
}

/// Global minimum of the reduced energy over all critical phase branches.
///
/// Every sign orthant of the real matter amplitudes (the `φ ∈ {0, π}`
/// branches) is seeded with `starts_per_branch` starts; the field phases
/// follow from the sign of each mode overlap. The normal state is always a
/// candidate, so the returned energy is never positive.
pub fn minimize_ground(model: &ModelSpec, opts: &MinimizeOptions) -> Result<GroundSolution> {
    model.validate()?;
    let surface = ReducedSurface::new(model);
    Ok(minimize_on_surface(model, &surface, opts, true))
}

/// Re-minimise from `hints` only and keep the result if it beats `current`
/// by more than the tie window.
pub fn refine_ground(
    model: &ModelSpec,
    current: &GroundSolution,
    hints: &[Vec<f64>],
    opts: &MinimizeOptions,
) -> GroundSolution {
    let surface = ReducedSurface::new(model);
    let opts = MinimizeOptions {
        hints: hints.to_vec(),
        ..opts.clone()
    };
    let candidate = minimize_on_surface(model, &surface, &opts, false);
    if candidate.energy < current.energy - TIE_TOL {
        candidate
    } else {
        current.clone()
    }
}

pub(crate) fn minimize_on_surface(
    model: &ModelSpec,
    surface: &ReducedSurface,
    opts: &MinimizeOptions,
    cold: bool,
) -> GroundSolution {
    let n = model.levels;
    let chart = SphereChart::new(n);
    let fg = |a: &[f64]| {
        let c = chart.to_cart(a);
        let ev = surface.eval(&c);
        (ev.energy, chart.pull_back(a, &ev.grad))
    };

    let mut pole = vec![0.0; n];
    pole[0] = 1.0;
    let mut candidates = vec![Candidate {
        c: pole,
        energy: 0.0,
        gnorm: 0.0,
        converged: true,
    }];

    let orthants = if cold { 1usize << (n - 1) } else { 0 };
    let run = |start: &[f64], candidates: &mut Vec<Candidate>| {
        let d = bfgs(&fg, chart.from_cart(start), opts.tol, opts.max_iter);
        candidates.push(Candidate {
            c: chart.to_cart(&d.x),
            energy: d.f,
            gnorm: d.gnorm,
            converged: d.converged,
        });
    };
    for o in 0..orthants {
        let signs: Vec<f64> = (0..n)
            .map(|k| if k > 0 && (o >> (k - 1)) & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(o as u64));
        for start in orthant_starts(model, &signs, opts.starts_per_branch, &mut rng) {
            run(&start, &mut candidates);
        }
    }
    for hint in &opts.hints {
        if hint.len() == n && norm(hint) > 0.0 {
            run(&normalise(hint.clone()), &mut candidates);
        }
    }

    let weight = |c: &Candidate| c.c[0].abs();
    let mut best = 0;
    for (i, cand) in candidates.iter().enumerate().skip(1) {
        let b = &candidates[best];
        let better = cand.energy < b.energy - TIE_TOL
            || ((cand.energy - b.energy).abs() <= TIE_TOL && weight(cand) > weight(b) + 1e-9);
        if better {
            best = i;
        }
    }
    let winner = &candidates[best];
    let canon = surface.canonical(&winner.c, 1e-9);
    let tie = candidates.iter().any(|cand| {
        (cand.energy - winner.energy).abs() <= TIE_TOL && {
            let other = surface.canonical(&cand.c, 1e-9);
            other.iter().zip(&canon).any(|(a, b)| (a - b).abs() > 1e-5)
        }
    });

    if winner.energy > -NORMAL_ETA {
        let mut solution = solution_from(model, surface, candidates[0].c.clone(), 0.0, 0.0, true);
        solution.tie = tie;
        return solution;
    }
    let mut solution = solution_from(model, surface, canon, winner.energy, winner.gnorm, winner.converged);
    solution.tie = tie;
    solution
}

fn solution_from(
    model: &ModelSpec,
    surface: &ReducedSurface,
    c: Vec<f64>,
    energy: f64,
    grad_norm: f64,
    converged: bool,
) -> GroundSolution {
    let n = c.len();
    let overlaps = surface.mode_overlaps(model, &c);
    let c0 = c[0].abs().max(1e-300);
    let sign0 = if c[0] < 0.0 { -1.0 } else { 1.0 };
    let rho: Vec<f64> = c.iter().map(|v| v.abs() / c0).collect();
    let phi: Vec<f64> = (0..n)
        .map(|k| if k > 0 && c[k] * sign0 < 0.0 { PI } else { 0.0 })
        .collect();
    let r: Vec<f64> = overlaps
        .iter()
        .zip(&model.modes)
        .map(|(s, w)| 2.0 * s.abs() / w)
        .collect();
    let theta: Vec<f64> = overlaps.iter().map(|s| if *s < 0.0 { PI } else { 0.0 }).collect();
    let region = if energy < -NORMAL_ETA {
        Region::Collective
    } else {
        Region::Normal
    };
    GroundSolution {
        params: CoherentParams { rho, phi, r, theta },
        amplitudes: c,
        overlaps,
        energy,
        region,
        tie: false,
        grad_norm,
        converged,
    }
}
