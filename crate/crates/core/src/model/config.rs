//! Named atomic configurations and the tabulated dipole-dipole rows.
//!
//! Configurations are plain data: which transitions carry a dipole, which two
//! of them span the scanned coupling plane, and the default middle level.

use num_complex::Complex64;

use super::{Coupling, GTable, ModelSpec};
use crate::error::{Error, Result};

/// A row of dipole-dipole strengths `(g_jkjk, g_lmlm, g_jklm)` for the two
/// axis transitions `(j,k)` and `(l,m)` of a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct GRow {
    pub name: String,
    pub jkjk: f64,
    pub lmlm: f64,
    pub jklm: f64,
}

impl GRow {
    pub fn new(name: impl Into<String>, jkjk: f64, lmlm: f64, jklm: f64) -> Self {
        Self {
            name: name.into(),
            jkjk,
            lmlm,
            jklm,
        }
    }

    pub fn zero() -> Self {
        Self::new("g0", 0.0, 0.0, 0.0)
    }

    /// Tabulated rows `g0`, `g±1`, `g±2`, `g±3`. An unsigned index means the
    /// repulsive (positive) row.
    pub fn named(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownGRow(name.to_string());
        let rest = name.strip_prefix('g').ok_or_else(unknown)?;
        let (sign, idx) = match rest.as_bytes().first() {
            Some(b'+') => (1.0, &rest[1..]),
            Some(b'-') => (-1.0, &rest[1..]),
            _ => (1.0, rest),
        };
        let (a, b, c) = match idx {
            "0" => return Ok(Self::zero()),
            "1" => (0.1, 0.04, 14.0 * 1e-5f64.sqrt()),
            "2" => (0.3, 0.2, 14.0 * 1.5f64.sqrt() * 1e-2),
            "3" => (1.0, 0.4, 140.0 * 1e-5f64.sqrt()),
            _ => return Err(unknown()),
        };
        let canonical = format!("g{}{idx}", if sign > 0.0 { '+' } else { '-' });
        Ok(Self::new(canonical, sign * a, sign * b, sign * c))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            format!("{}*{factor}", self.name),
            self.jkjk * factor,
            self.lmlm * factor,
            self.jklm * factor,
        )
    }
}

pub fn table_rows() -> Vec<GRow> {
    ["g-3", "g-2", "g-1", "g0", "g+1", "g+2", "g+3"]
        .iter()
        .map(|n| GRow::named(n).expect("tabulated row"))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub name: &'static str,
    pub levels: usize,
    /// Middle level energy `ω_2` used when none is given.
    pub default_mid: Option<f64>,
    /// Dipole-allowed transitions, zero-based `(lower, upper)`. Each gets its own
    /// resonant mode, in this order.
    pub transitions: &'static [(usize, usize)],
    /// Transitions whose couplings span the scan plane, `(j,k)` then `(l,m)`.
    pub axes: &'static [(usize, usize)],
}

impl Configuration {
    pub fn prohibited(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.levels {
            for k in j + 1..self.levels {
                if !self.transitions.contains(&(j, k)) {
                    out.push((j, k));
                }
            }
        }
        out
    }

    pub fn level_energies(&self, mid: f64) -> Vec<f64> {
        match self.levels {
            2 => vec![0.0, 1.0],
            3 => vec![0.0, mid, 1.0],
            _ => vec![0.0, mid, (1.0 + mid) / 2.0, 1.0],
        }
    }
}

const CONFIGURATIONS: &[Configuration] = &[
    Configuration {
        name: "two_level",
        levels: 2,
        default_mid: None,
        transitions: &[(0, 1)],
        axes: &[(0, 1)],
    },
    Configuration {
        name: "Xi",
        levels: 3,
        default_mid: Some(0.75),
        transitions: &[(0, 1), (1, 2)],
        axes: &[(0, 1), (1, 2)],
    },
    Configuration {
        name: "Lambda",
        levels: 3,
        default_mid: Some(0.25),
        transitions: &[(0, 2), (1, 2)],
        axes: &[(0, 2), (1, 2)],
    },
    Configuration {
        name: "V",
        levels: 3,
        default_mid: Some(0.75),
        transitions: &[(0, 1), (0, 2)],
        axes: &[(0, 1), (0, 2)],
    },
    Configuration {
        name: "lambda4",
        levels: 4,
        default_mid: Some(1.0 / 3.0),
        transitions: &[(0, 2), (1, 2), (2, 3)],
        axes: &[(0, 2), (1, 2)],
    },
    Configuration {
        name: "diamond4",
        levels: 4,
        default_mid: Some(1.0 / 3.0),
        transitions: &[(0, 1), (0, 2), (1, 3), (2, 3)],
        axes: &[(0, 1), (0, 2)],
    },
];

pub fn configuration_names() -> Vec<&'static str> {
    CONFIGURATIONS.iter().map(|c| c.name).collect()
}

pub fn configuration(name: &str) -> Result<&'static Configuration> {
    CONFIGURATIONS
        .iter()
        .find(|c| c.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownConfiguration(name.to_string()))
}

/// `μ = x · ½√(Ω ω_gap)`: `x = 1` is the bare critical coupling of the transition.
pub fn mu_from_x(x: f64, omega_mode: f64, gap: f64) -> f64 {
    x * 0.5 * (omega_mode * gap).sqrt()
}

/// Build a named configuration at double resonance.
///
/// The row's first two columns go to the axis transitions' self terms and the
/// third to their cross term. In 4-level configurations the remaining
/// transitions reuse the second column for their self terms and the third for
/// every cross term, and carry zero matter-field coupling.
pub fn named_configuration(name: &str, mid: Option<f64>, row: &GRow, x: [f64; 2]) -> Result<ModelSpec> {
    let cfg = configuration(name)?;
    let mid = match (cfg.levels, mid.or(cfg.default_mid)) {
        (2, _) => 0.0,
        (_, Some(m)) if m > 0.0 && m < 1.0 => m,
        (_, m) => {
            return Err(Error::InvalidInput(format!(
                "middle level must lie in (0, 1), got {}",
                m.map_or("none".into(), |v| v.to_string())
            )))
        }
    };
    for v in [row.jkjk, row.lmlm, row.jklm].iter().chain(&x) {
        if !v.is_finite() {
            return Err(Error::InvalidInput("non-finite configuration parameter".into()));
        }
    }
    let omegas = cfg.level_energies(mid);
    let mut modes = Vec::new();
    let mut couplings = Vec::new();
    for (s, &(j, k)) in cfg.transitions.iter().enumerate() {
        let gap = omegas[k] - omegas[j];
        modes.push(gap);
        let xs = cfg.axes.iter().position(|&a| a == (j, k)).map_or(0.0, |i| x[i]);
        couplings.push(Coupling {
            lower: j,
            upper: k,
            mode: s,
            mu: mu_from_x(xs, gap, gap),
        });
    }

    let self_term = |t: (usize, usize)| match cfg.axes.iter().position(|&a| a == t) {
        Some(0) => row.jkjk,
        _ => row.lmlm,
    };
    let mut gtable = GTable::new(cfg.levels);
    for (a, &ta) in cfg.transitions.iter().enumerate() {
        for &tb in &cfg.transitions[a..] {
            let v = if ta == tb { self_term(ta) } else { row.jklm };
            if v != 0.0 {
                gtable.insert_generator([ta.0, ta.1, tb.0, tb.1], Complex64::new(v, 0.0), true)?;
            }
        }
    }

    let model = ModelSpec {
        levels: cfg.levels,
        omegas,
        modes,
        couplings,
        gtable,
        real_dipoles: true,
        config: cfg.name.to_string(),
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_defaults() {
        let m = named_configuration("Xi", Some(0.75), &GRow::zero(), [1.0, 1.0]).unwrap();
        assert_eq!(m.modes, vec![0.75, 0.25]);
        assert!((m.couplings[0].mu - 0.375).abs() < 1e-15);
        assert!(!m.serves(0, 2));
    }

    #[test]
    fn lambda_zero_coupling() {
        let m = named_configuration("Lambda", Some(0.25), &GRow::zero(), [0.0, 0.0]).unwrap();
        assert!(m.couplings.iter().all(|c| c.mu == 0.0));
        assert!(!m.serves(0, 1));
        assert_eq!(m.omegas, vec![0.0, 0.25, 1.0]);
    }

    #[test]
    fn v_nonzero_g_set() {
        let m = named_configuration("V", None, &GRow::named("g3").unwrap(), [1.0, 1.0]).unwrap();
        let mut got: Vec<_> = m
            .gtable
            .iter()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(i, _)| *i)
            .collect();
        got.sort();
        // Generators g_1212, g_1221, g_1313, g_1331, g_2131, g_2113 and their partners.
        for gen in [
            [0, 1, 0, 1],
            [0, 1, 1, 0],
            [0, 2, 0, 2],
            [0, 2, 2, 0],
            [1, 0, 2, 0],
            [1, 0, 0, 2],
        ] {
            assert!(got.contains(&gen), "{gen:?}");
        }
        assert!(got.iter().all(|i| i.iter().all(|&l| l < 3)));
        assert!(got.iter().all(|i| !(i[0].min(i[1]) == 1 && i[0].max(i[1]) == 2)));
    }

    #[test]
    fn rows_verbatim() {
        let r = GRow::named("g+1").unwrap();
        assert_eq!((r.jkjk, r.lmlm), (0.1, 0.04));
        assert_eq!(r.jklm, 14.0 * 1e-5f64.sqrt());
        assert_eq!(GRow::named("g1").unwrap(), r);
        let m = GRow::named("g-2").unwrap();
        assert_eq!(m.jklm, -14.0 * 1.5f64.sqrt() * 1e-2);
        assert!(GRow::named("g4").is_err());
        assert!(GRow::named("x1").is_err());
        assert_eq!(table_rows().len(), 7);
    }

    #[test]
    fn bad_mid_rejected() {
        assert!(named_configuration("V", Some(1.0), &GRow::zero(), [0.0, 0.0]).is_err());
        assert!(named_configuration("V", Some(0.0), &GRow::zero(), [0.0, 0.0]).is_err());
        assert!(matches!(
            named_configuration("W", None, &GRow::zero(), [0.0, 0.0]),
            Err(Error::UnknownConfiguration(_))
        ));
    }

    #[test]
    fn four_level_prohibitions() {
        let l = configuration("lambda4").unwrap();
        assert_eq!(l.prohibited(), vec![(0, 1), (0, 3), (1, 3)]);
        let d = configuration("diamond4").unwrap();
        assert_eq!(d.prohibited(), vec![(0, 3), (1, 2)]);
        let m = named_configuration("diamond4", None, &GRow::named("g2").unwrap(), [1.0, 0.5]).unwrap();
        assert_eq!(m.omegas.len(), 4);
    }
}
