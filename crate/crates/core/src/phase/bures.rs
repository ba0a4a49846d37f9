use rayon::prelude::*;

use super::{Field, PhaseGrid};
use crate::error::{Error, Result};
use crate::variational::{bures_distance, minimize_ground, GroundSolution, ProductState};

fn uniform_step(axis: &[f64]) -> Option<f64> {
    if axis.len() < 2 {
        return None;
    }
    let h = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    axis.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
        .then_some(h)
}

/// Largest Bures distance between the ground state at each node and the ground
/// states at the four axis-aligned points a distance `eps` away.
///
/// When `eps` equals the grid step the neighbouring nodes are reused;
/// otherwise the offset points are minimised afresh. Offsets falling outside
/// the scanned window are skipped.
pub fn bures_ridge(grid: &PhaseGrid, atoms: f64, eps: f64) -> Result<Field> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput("Bures offset must be positive".into()));
    }
    if !(atoms >= 1.0) {
        return Err(Error::InvalidInput("Bures distance needs at least one atom".into()));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let matches = |axis: &[f64]| uniform_step(axis).map_or(axis.len() < 2, |h| (h - eps).abs() <= 1e-9 * h);
    let reuse = matches(&grid.xs) && matches(&grid.ys);
    let states: Vec<ProductState> = grid
        .cells
        .iter()
        .map(|c| ProductState::from_solution(c, atoms))
        .collect();

    let values = (0..nx * ny)
        .into_par_iter()
        .map(|i| {
            let (ix, iy) = (i % nx, i / nx);
            let here = &states[i];
            let mut best: f64 = 0.0;
            if reuse {
                let mut neighbours = Vec::with_capacity(4);
                if ix > 0 {
                    neighbours.push(i - 1);
                }
                if ix + 1 < nx {
                    neighbours.push(i + 1);
                }
                if iy > 0 {
                    neighbours.push(i - nx);
                }
                if iy + 1 < ny {
                    neighbours.push(i + nx);
                }
                for j in neighbours {
                    best = best.max(bures_distance(here, &states[j], atoms)?);
                }
            } else {
                let (x, y) = (grid.xs[ix], grid.ys[iy]);
                let inside = |v: f64, axis: &[f64]| v >= axis[0] - 1e-12 && v <= axis[axis.len() - 1] + 1e-12;
                let mut points = Vec::with_capacity(4);
                for dx in [-eps, eps] {
                    if inside(x + dx, &grid.xs) {
                        points.push((x + dx, y));
                    }
                }
                if grid.axes.len() > 1 {
                    for dy in [-eps, eps] {
                        if inside(y + dy, &grid.ys) {
                            points.push((x, y + dy));
                        }
                    }
                }
                for (px, py) in points {
                    let s: GroundSolution = minimize_ground(&grid.model_at(px, py), &grid.options.minimize)?;
                    best = best.max(bures_distance(here, &ProductState::from_solution(&s, atoms), atoms)?);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Field { nx, ny, values })
}
