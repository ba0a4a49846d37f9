//! Exhaustive grid search of the reduced energy surface for 2- and 3-level atoms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::variational::ReducedSurface;

pub const DEFAULT_RESOLUTION: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteMin {
    pub energy: f64,
    /// Unit real matter vector `γ/‖γ‖` at the best grid point.
    pub amplitudes: Vec<f64>,
    pub resolution: usize,
}

/// Grid minimum of the reduced energy.
///
/// The unit matter vector is sampled on a uniform grid of its hyperspherical
/// angles with `resolution` points per angle. Negative components stand for
/// the `φ = π` branches, so every phase branch is covered, and the poles reach
/// the `ρ_k → ∞` limits. The result bounds the true minimum from above.
pub fn brute_min(model: &ModelSpec, resolution: usize) -> Result<BruteMin> {
    model.validate()?;
    if model.levels > 3 {
        return Err(Error::InvalidInput(format!(
            "grid search handles at most 3 levels, got {}",
            model.levels
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be at least 2".into()));
    }
    let surface = ReducedSurface::new(model);
    let mut best = BruteMin {
        energy: surface.energy(&normal(model.levels)),
        amplitudes: normal(model.levels),
        resolution,
    };
    let mut consider = |c: Vec<f64>| {
        let e = surface.energy(&c);
        if e < best.energy {
            best.energy = e;
            best.amplitudes = c;
        }
    };
    let step = |range: f64, i: usize| range * i as f64 / (resolution - 1) as f64;
    match model.levels {
        2 => {
            for i in 0..resolution {
                let a = step(PI, i);
                consider(vec![a.cos(), a.sin()]);
            }
        }
        _ => {
            for i in 0..resolution {
                let a = step(0.5 * PI, i);
                for j in 0..resolution {
                    let b = step(2.0 * PI, j);
                    consider(vec![a.cos(), a.sin() * b.cos(), a.sin() * b.sin()]);
                }
            }
        }
    }
    Ok(best)
}

fn normal(levels: usize) -> Vec<f64> {
    let mut c = vec![0.0; levels];
    c[0] = 1.0;
    c
}
