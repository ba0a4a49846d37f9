use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ddphase::model::GRow;
use ddphase::phase::{
    bures_ridge, casimir_fields, classify_separatrix, derivative_fields, extract_separatrix, linspace,
    scan_configuration, CurveKind, JumpRule, PhaseGrid, ScanOptions,
};
use ddphase::variational::{minimize_ground, MinimizeOptions};

fn grid(config: &str, row: &GRow, n: usize) -> PhaseGrid {
    let axis = linspace(0.0, 3.0, n);
    scan_configuration(config, None, row, &axis, &axis, &ScanOptions::default()).unwrap()
}

#[test]
fn scan_matches_fresh_minimisations() {
    let g = grid("V", &GRow::named("g3").unwrap(), 31);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (ix, iy) = (rng.gen_range(0..31), rng.gen_range(0..31));
        let fresh = minimize_ground(&g.model_at(g.xs[ix], g.ys[iy]), &MinimizeOptions::default()).unwrap();
        assert!((fresh.energy - g.cell(ix, iy).energy).abs() < 1e-9, "node ({ix},{iy})");
    }
}

#[test]
fn surfaces_respect_their_bounds() {
    let g = grid("V", &GRow::named("g3").unwrap(), 31);
    assert!(g
        .cells
        .iter()
        .all(|c| c.energy <= 0.0 && (c.energy == 0.0) == c.is_normal()));
    let c = casimir_fields(&g, 2.0).unwrap();
    for (cell, d) in g.cells.iter().zip(&c.delta.values) {
        assert!(*d >= 0.0);
        if cell.is_normal() {
            assert_eq!(*d, 0.0);
        }
    }
    let small = bures_ridge(&g, 5.0, g.xs[1]).unwrap();
    let large = bures_ridge(&g, 500.0, g.xs[1]).unwrap();
    assert!(small.min() >= 0.0 && large.max() <= SQRT_2);
    for (s, l) in small.values.iter().zip(&large.values) {
        assert!(l + 1e-12 >= *s);
    }
}

#[test]
fn repulsive_rows_enlarge_the_normal_region() {
    for config in ["Xi", "Lambda", "V"] {
        let counts: Vec<usize> = ["g-1", "g0", "g+1"]
            .iter()
            .map(|r| grid(config, &GRow::named(r).unwrap(), 61).normal_count())
            .collect();
        assert!(counts[0] < counts[1] && counts[1] < counts[2], "{config}: {counts:?}");
    }
}

fn mode_swap_points(g: &PhaseGrid) -> Vec<[f64; 2]> {
    let d = derivative_fields(g).unwrap();
    let c = casimir_fields(g, 2.0).unwrap();
    let cl = classify_separatrix(g, &d, &c, &JumpRule::default());
    extract_separatrix(g, &c, &cl)
        .into_iter()
        .filter(|k| k.kind == CurveKind::ModeSwap)
        .flat_map(|k| k.points)
        .collect()
}

#[test]
fn mode_swap_line_approaches_the_uncoupled_one() {
    let reference = mode_swap_points(&grid("V", &GRow::zero(), 41));
    assert!(!reference.is_empty());
    let g3 = GRow::named("g3").unwrap();
    let distances: Vec<f64> = [1.0, 0.1, 0.01]
        .iter()
        .map(|&s| {
            let points = mode_swap_points(&grid("V", &g3.scaled(s), 41));
            assert!(!points.is_empty());
            points
                .iter()
                .map(|p| {
                    reference
                        .iter()
                        .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum::<f64>()
                / points.len() as f64
        })
        .collect();
    assert!(distances.windows(2).all(|w| w[1] <= w[0]), "{distances:?}");
    assert!(distances[2] < 0.02, "{distances:?}");
}
