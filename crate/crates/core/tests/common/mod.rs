#![allow(dead_code)]

use ddphase::model::{Coupling, GTable, ModelSpec};
use num_complex::Complex64;
use rand::Rng;

/// Every transition gets its own unit-frequency mode with zero coupling, so any
/// g-table entry is admissible.
pub fn all_served(levels: usize, gtable: GTable) -> ModelSpec {
    let mut couplings = Vec::new();
    let mut modes = Vec::new();
    for j in 0..levels {
        for k in j + 1..levels {
            couplings.push(Coupling {
                lower: j,
                upper: k,
                mode: modes.len(),
                mu: 0.0,
            });
            modes.push(1.0);
        }
    }
    let omegas = (0..levels).map(|i| i as f64 / (levels - 1) as f64).collect();
    let real_dipoles = gtable.is_real();
    ModelSpec {
        levels,
        omegas,
        modes,
        couplings,
        gtable,
        real_dipoles,
        config: "custom".into(),
    }
}

/// Random table obeying the symmetry rules; complex unless `real`.
pub fn random_gtable(levels: usize, rng: &mut impl Rng, real: bool) -> GTable {
    let mut table = GTable::new(levels);
    for j in 0..levels {
        for k in 0..levels {
            for l in 0..levels {
                for m in 0..levels {
                    if j == k || l == m || table.get(j, k, l, m).norm() != 0.0 {
                        continue;
                    }
                    let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
                    let mut v = Complex64::new(rng.gen_range(-1.0..1.0), im);
                    if [k, j, m, l] == [j, k, l, m] || [k, j, m, l] == [l, m, j, k] {
                        v.im = 0.0;
                    }
                    table.insert_generator([j, k, l, m], v, real).expect("valid generator");
                }
            }
        }
    }
    table
}
