use serde::Serialize;

use super::{Field, PhaseGrid};
use crate::error::{Error, Result};
use crate::variational::GroundSolution;

/// Region of a grid node: the normal state, or the collective state dominated
/// by the first (`Sub(0)`) or second (`Sub(1)`) scan transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Normal,
    Sub(usize),
}

/// `⟨C_jk⟩` for the two-level subsystem `{j, k}` in the coherent matter state.
///
/// With `q = (|γ_j|² + |γ_k|²)/‖γ‖²` the pair Casimir `Σ_{a,b∈{j,k}} A_ab A_ba`
/// has expectation `N_a(N_a−1) q² + 2 N_a q`.
pub fn casimir_expectation(amplitudes: &[f64], pair: (usize, usize), atoms: f64) -> f64 {
    let norm2: f64 = amplitudes.iter().map(|c| c * c).sum();
    let q = (amplitudes[pair.0].powi(2) + amplitudes[pair.1].powi(2)) / norm2;
    atoms * (atoms - 1.0) * q * q + 2.0 * atoms * q
}

/// `δC = |⟨C_jk − C_lm⟩|`.
pub fn casimir_delta(
    solution: &GroundSolution,
    pair_a: (usize, usize),
    pair_b: (usize, usize),
    atoms: f64,
) -> Result<f64> {
    let n = solution.amplitudes.len();
    if [pair_a.0, pair_a.1, pair_b.0, pair_b.1].iter().any(|&i| i >= n) || pair_a.0 == pair_a.1 || pair_b.0 == pair_b.1
    {
        return Err(Error::InvalidInput(
            "Casimir pairs must name two distinct levels of the atom".into(),
        ));
    }
    let a = casimir_expectation(&solution.amplitudes, pair_a, atoms);
    let b = casimir_expectation(&solution.amplitudes, pair_b, atoms);
    Ok((a - b).abs())
}

/// Collective nodes belong to the subsystem holding more of the population.
pub fn subregion(solution: &GroundSolution, pairs: &[(usize, usize)]) -> Phase {
    if solution.is_normal() {
        return Phase::Normal;
    }
    let q = |(j, k): (usize, usize)| solution.amplitudes[j].powi(2) + solution.amplitudes[k].powi(2);
    match pairs {
        [a, b] if q(*b) > q(*a) => Phase::Sub(1),
        _ => Phase::Sub(0),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CasimirFields {
    pub c_a: Field,
    pub c_b: Field,
    /// `⟨C_a⟩ − ⟨C_b⟩`; its zero level traces the mode-swap line.
    pub signed: Field,
    /// `δC = |⟨C_a⟩ − ⟨C_b⟩|`.
    pub delta: Field,
    pub labels: Vec<Phase>,
}

/// Casimir expectations over the scan transitions of a two-axis grid.
pub fn casimir_fields(grid: &PhaseGrid, atoms: f64) -> Result<CasimirFields> {
    let [a, b] = grid.axes[..] else {
        return Err(Error::InvalidInput(
            "the Casimir difference needs two scan transitions".into(),
        ));
    };
    if !(atoms >= 1.0) {
        return Err(Error::InvalidInput(
            "the Casimir difference needs at least one atom".into(),
        ));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let c_a = Field::from_fn(nx, ny, |i, j| {
        casimir_expectation(&grid.cell(i, j).amplitudes, a, atoms)
    });
    let c_b = Field::from_fn(nx, ny, |i, j| {
        casimir_expectation(&grid.cell(i, j).amplitudes, b, atoms)
    });
    let signed = Field {
        nx,
        ny,
        values: c_a.values.iter().zip(&c_b.values).map(|(x, y)| x - y).collect(),
    };
    let delta = Field {
        nx,
        ny,
        values: signed.values.iter().map(|v| v.abs()).collect(),
    };
    let labels = grid.cells.iter().map(|c| subregion(c, &grid.axes)).collect();
    Ok(CasimirFields {
        c_a,
        c_b,
        signed,
        delta,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{named_configuration, GRow};
    use crate::variational::{minimize_ground, MinimizeOptions};

    #[test]
    fn pure_subsystem_reaches_maximum() {
        assert_eq!(casimir_expectation(&[1.0, 0.0, 0.0], (0, 1), 2.0), 6.0);
        assert_eq!(casimir_expectation(&[0.0, 0.6, 0.8], (1, 2), 2.0), 6.0);
    }

    #[test]
    fn normal_state_has_no_difference() {
        let m = named_configuration("V", None, &GRow::zero(), [0.2, 0.2]).unwrap();
        let s = minimize_ground(&m, &MinimizeOptions::default()).unwrap();
        assert_eq!(casimir_delta(&s, (0, 1), (0, 2), 2.0).unwrap(), 0.0);
        assert_eq!(subregion(&s, &[(0, 1), (0, 2)]), Phase::Normal);
    }

    #[test]
    fn shared_population_splits() {
        let c = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0];
        assert_eq!(casimir_expectation(&c, (0, 1), 2.0), 6.0);
        // q = 1/2 gives 2·1·¼ + 2·2·½.
        assert!((casimir_expectation(&c, (0, 2), 2.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn bad_pair_rejected() {
        let m = named_configuration("V", None, &GRow::zero(), [0.2, 0.2]).unwrap();
        let s = minimize_ground(&m, &MinimizeOptions::default()).unwrap();
        assert!(casimir_delta(&s, (0, 3), (0, 2), 2.0).is_err());
    }
}
