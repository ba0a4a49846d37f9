//! Closed-form ground state of a single driven transition.
//!
//! With `t = ρ²/(1+ρ²)` the reduced surface is `ω_j + ω_jk [t − (x² − g/ω_jk) t(1−t)]`,
//! which is minimised in closed form. `y = 1 + g/ω_jk` shifts the critical
//! coupling to `x_c = √y`.

use serde::Serialize;

use crate::error::Result;
use crate::model::{named_configuration, GRow, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelParams {
    pub omega_gap: f64,
    pub omega_mode: f64,
    /// `g = g_jkkj + g_jkjk`.
    pub g_pair: f64,
    pub x: f64,
}

impl TwoLevelParams {
    pub fn mu_critical(&self) -> f64 {
        0.5 * (self.omega_mode * self.omega_gap).sqrt()
    }

    pub fn y(&self) -> f64 {
        y_from_g(self.g_pair, self.omega_gap)
    }
}

pub fn y_from_g(g_pair: f64, omega_gap: f64) -> f64 {
    (omega_gap + g_pair) / omega_gap
}

/// The `two_level` configuration at resonance with `g_1212 = g_1221 = g/2`.
pub fn two_level_model(x: f64, g_pair: f64) -> Result<ModelSpec> {
    named_configuration("two_level", None, &GRow::new("pair", g_pair / 2.0, 0.0, 0.0), [x, 0.0])
}

/// Critical amplitudes: `0` always, plus `√((x²−y)/(x²−y+2))` above threshold.
pub fn rho_critical(x: f64, y: f64) -> Vec<f64> {
    let s = x * x - y;
    if s <= 0.0 {
        vec![0.0]
    } else {
        vec![0.0, (s / (s + 2.0)).sqrt()]
    }
}

/// Minimum energy per atom.
pub fn e_min(x: f64, y: f64, omega_j: f64, omega_gap: f64) -> f64 {
    let s = x * x - y;
    if s < 0.0 {
        omega_j
    } else {
        omega_j - s * s / (4.0 * (s + 1.0)) * omega_gap
    }
}

/// `dE_min/dx`.
pub fn e_min_dx(x: f64, y: f64, omega_gap: f64) -> f64 {
    let s = x * x - y;
    if s < 0.0 {
        0.0
    } else {
        -omega_gap * s * (s + 2.0) / (4.0 * (s + 1.0).powi(2)) * 2.0 * x
    }
}

/// `d²E_min/dx²`.
pub fn e_min_dx2(x: f64, y: f64, omega_gap: f64) -> f64 {
    let s = x * x - y;
    if s < 0.0 {
        0.0
    } else {
        let d1 = -omega_gap * s * (s + 2.0) / (4.0 * (s + 1.0).powi(2));
        let d2 = -omega_gap / (2.0 * (s + 1.0).powi(3));
        2.0 * d1 + 4.0 * x * x * d2
    }
}

/// `√y`, or `None` when the normal region is absent (`y ≤ 0`).
pub fn x_critical(y: f64) -> Option<f64> {
    (y > 0.0).then(|| y.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwoLevelTransition {
    /// No normal region exists.
    NoNormalRegion,
    SecondOrder {
        x_c: f64,
        /// Largest `|dE/dx|` difference across `x_c` at step `h`.
        first_jump: f64,
        /// `d²E/dx²` on the collective side minus the normal side.
        second_jump: f64,
        /// Analytic limit `d²E/dx²(x_c⁺) = −2 y ω_jk`; the normal side is flat.
        second_jump_exact: f64,
    },
    FirstOrder {
        x_c: f64,
        first_jump: f64,
    },
}

/// Order of the transition at `x_c` from central differences of `e_min`.
///
/// One-sided stencils of width `h` on each side estimate the left and right
/// first and second derivatives. A continuous first derivative leaves a gap of
/// order `h · d²E`; anything ten times larger is reported as first order.
pub fn classify_2level(y: f64, omega_gap: f64, h: f64) -> TwoLevelTransition {
    let Some(xc) = x_critical(y) else {
        return TwoLevelTransition::NoNormalRegion;
    };
    let e = |x: f64| e_min(x, y, 0.0, omega_gap);
    let left1 = (e(xc - h) - e(xc - 2.0 * h)) / h;
    let right1 = (e(xc + 2.0 * h) - e(xc + h)) / h;
    let left2 = (e(xc - h) - 2.0 * e(xc - 2.0 * h) + e(xc - 3.0 * h)) / (h * h);
    let right2 = (e(xc + 3.0 * h) - 2.0 * e(xc + 2.0 * h) + e(xc + h)) / (h * h);
    let first_jump = (right1 - left1).abs();
    let second_jump = right2 - left2;
    let exact = -2.0 * y * omega_gap;
    if first_jump > 10.0 * h * (1.0 + second_jump.abs()) {
        TwoLevelTransition::FirstOrder { x_c: xc, first_jump }
    } else {
        TwoLevelTransition::SecondOrder {
            x_c: xc,
            first_jump,
            second_jump,
            second_jump_exact: exact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelSample {
    pub x: f64,
    pub e: f64,
    pub de: f64,
    pub d2e: f64,
}

/// `(x, E_min, dE/dx, d²E/dx²)` on `[from, to]` with the given step.
pub fn sweep(from: f64, to: f64, step: f64, y: f64, omega_gap: f64) -> Vec<TwoLevelSample> {
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let x = from + i as f64 * step;
            TwoLevelSample {
                x,
                e: e_min(x, y, 0.0, omega_gap),
                de: e_min_dx(x, y, omega_gap),
                d2e: e_min_dx2(x, y, omega_gap),
            }
        })
        .collect()
}
