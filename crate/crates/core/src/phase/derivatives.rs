use super::{Field, PhaseGrid};
use crate::error::{Error, Result};

/// Ehrenfest detectors `δE = ∂_x E + ∂_y E` and `δ²E = ∂_x δE + ∂_y δE`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub d_e: Field,
    pub d2_e: Field,
}

fn step(axis: &[f64]) -> Result<f64> {
    if axis.len() < 2 {
        return Ok(0.0);
    }
    let h = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    let tol = 1e-9 * h.abs().max(axis[0].abs());
    if axis.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
        return Err(Error::InvalidInput(
            "derivative fields need uniformly spaced axes".into(),
        ));
    }
    Ok(h)
}

/// Offsets of the samples used for the derivative at position `i` of an axis
/// of length `len`: central inside, second-order one-sided at the ends.
pub(crate) fn axis_stencil(i: usize, len: usize) -> &'static [i64] {
    match len {
        0 | 1 => &[],
        2 => {
            if i == 0 {
                &[0, 1]
            } else {
                &[-1, 0]
            }
        }
        _ if i == 0 => &[0, 1, 2],
        _ if i == len - 1 => &[-2, -1, 0],
        _ => &[-1, 1],
    }
}

/// `∂f/∂x` along one axis: central differences inside, one-sided at the ends
/// and zero on a degenerate axis.
fn partial(f: &Field, h: f64, along_x: bool) -> Field {
    let len = if along_x { f.nx } else { f.ny };
    Field::from_fn(f.nx, f.ny, |ix, iy| {
        let at = |i: usize| if along_x { f.get(i, iy) } else { f.get(ix, i) };
        let i = if along_x { ix } else { iy };
        match len {
            0 | 1 => 0.0,
            2 => (at(1) - at(0)) / h,
            _ if i == 0 => (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h),
            _ if i == len - 1 => (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * h),
            _ => (at(i + 1) - at(i - 1)) / (2.0 * h),
        }
    })
}

fn directional(f: &Field, hx: f64, hy: f64) -> Field {
    let dx = partial(f, hx, true);
    let dy = partial(f, hy, false);
    Field {
        nx: f.nx,
        ny: f.ny,
        values: dx.values.iter().zip(&dy.values).map(|(a, b)| a + b).collect(),
    }
}

pub fn derivative_fields(grid: &PhaseGrid) -> Result<Derivatives> {
    let hx = step(&grid.xs)?;
    let hy = step(&grid.ys)?;
    let d_e = directional(&grid.energy, hx, hy);
    let d2_e = directional(&d_e, hx, hy);
    Ok(Derivatives { d_e, d2_e })
}
