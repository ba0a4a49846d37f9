//! Dipole-dipole coefficients `g_jklm` between induced transition dipoles.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type GIndex = [usize; 4];

const MATCH_TOL: f64 = 1e-14;

/// Sparse table of `g_jklm` keyed by zero-based `[j, k, l, m]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GTable {
    levels: usize,
    entries: BTreeMap<GIndex, Complex64>,
}

/// Symmetry partners of an index together with whether the value is conjugated.
fn partners(idx: GIndex, real_dipoles: bool) -> Vec<(GIndex, bool)> {
    let [j, k, l, m] = idx;
    let mut out = vec![([l, m, j, k], false), ([k, j, m, l], true)];
    if real_dipoles {
        out.push(([j, k, m, l], false));
        out.push(([k, j, l, m], false));
    }
    out
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= MATCH_TOL * (1.0 + a.norm().max(b.norm()))
}

impl GTable {
    pub fn new(levels: usize) -> Self {
        Self {
            levels,
            entries: BTreeMap::new(),
        }
    }

    /// Raw table without symmetry completion; may violate the hermiticity rules.
    pub fn from_raw(levels: usize, entries: impl IntoIterator<Item = (GIndex, Complex64)>) -> Result<Self> {
        let mut table = Self::new(levels);
        for (idx, v) in entries {
            table.check_index(idx)?;
            table.entries.insert(idx, v);
        }
        Ok(table)
    }

    /// Fill in every symmetry partner of the generating entries; conflicting
    /// partner values are rejected.
    pub fn from_generators(
        levels: usize,
        real_dipoles: bool,
        generators: impl IntoIterator<Item = (GIndex, Complex64)>,
    ) -> Result<Self> {
        let mut table = Self::new(levels);
        for (idx, v) in generators {
            table.insert_generator(idx, v, real_dipoles)?;
        }
        Ok(table)
    }

    pub fn insert_generator(&mut self, idx: GIndex, value: Complex64, real_dipoles: bool) -> Result<()> {
        self.check_index(idx)?;
        let mut orbit: BTreeMap<GIndex, Complex64> = BTreeMap::new();
        let mut stack = vec![(idx, value)];
        let mut conflicts = BTreeSet::new();
        while let Some((i, v)) = stack.pop() {
            if let Some(prev) = orbit.get(&i) {
                if !close(*prev, v) {
                    conflicts.insert(i);
                }
                continue;
            }
            orbit.insert(i, v);
            for (p, conj) in partners(i, real_dipoles) {
                stack.push((p, if conj { v.conj() } else { v }));
            }
        }
        for (i, v) in &orbit {
            if let Some(prev) = self.entries.get(i) {
                if !close(*prev, *v) {
                    conflicts.insert(*i);
                }
            }
        }
        if !conflicts.is_empty() {
            return Err(Error::GTable(conflicts.into_iter().collect()));
        }
        self.entries.extend(orbit);
        Ok(())
    }

    fn check_index(&self, idx: GIndex) -> Result<()> {
        for &i in &idx {
            if i >= self.levels {
                return Err(Error::LevelOutOfRange {
                    index: i,
                    levels: self.levels,
                });
            }
        }
        if idx[0] == idx[1] || idx[2] == idx[3] {
            return Err(Error::InvalidInput(format!(
                "g index {:?} does not pair two distinct levels",
                one_based(idx)
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, j: usize, k: usize, l: usize, m: usize) -> Complex64 {
        self.entries.get(&[j, k, l, m]).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| v.norm() == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.entries.values().all(|v| v.im == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            levels: self.levels,
            entries: self.entries.iter().map(|(i, v)| (*i, v * factor)).collect(),
        }
    }

    /// Indices breaking a symmetry rule or referencing an unsupported transition.
    ///
    /// `supported(j, k)` reports whether the (unordered) transition is served by a mode.
    pub fn violations(&self, real_dipoles: bool, supported: impl Fn(usize, usize) -> bool) -> Vec<GIndex> {
        let mut bad = BTreeSet::new();
        for (&idx, &v) in &self.entries {
            if v.norm() == 0.0 {
                continue;
            }
            let [j, k, l, m] = idx;
            if !supported(j, k) || !supported(l, m) {
                bad.insert(idx);
            }
            for (p, conj) in partners(idx, real_dipoles) {
                let expect = if conj { v.conj() } else { v };
                if !close(self.get(p[0], p[1], p[2], p[3]), expect) {
                    bad.insert(idx);
                    bad.insert(p);
                }
            }
        }
        bad.into_iter().collect()
    }
}

pub fn one_based(idx: GIndex) -> [usize; 4] {
    idx.map(|i| i + 1)
}

/// Point-dipole coupling `(d_a·d_b − 3(n̂·d_a)(n̂·d_b)) / R³` in units with `4πε₀ = 1`.
pub fn g_from_dipoles(d_a: [f64; 3], d_b: [f64; 3], nhat: [f64; 3], separation: f64) -> Result<f64> {
    if !(separation > 0.0) || !separation.is_finite() {
        return Err(Error::InvalidInput(format!(
            "separation must be positive, got {separation}"
        )));
    }
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let norm = dot(nhat, nhat).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "direction must be a unit vector, |n| = {norm}"
        )));
    }
    Ok((dot(d_a, d_b) - 3.0 * dot(nhat, d_a) * dot(nhat, d_b)) / separation.powi(3))
}

/// Real-dipole table from transition dipole vectors `d_jk` (one per allowed transition).
pub fn gtable_from_geometry(
    levels: usize,
    dipoles: &[((usize, usize), [f64; 3])],
    nhat: [f64; 3],
    separation: f64,
) -> Result<GTable> {
    let mut table = GTable::new(levels);
    for (a, &((j, k), da)) in dipoles.iter().enumerate() {
        for &((l, m), db) in &dipoles[a..] {
            let g = g_from_dipoles(da, db, nhat, separation)?;
            table.insert_generator([j, k, l, m], Complex64::new(g, 0.0), true)?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dipole_geometry_cases() {
        let z = [0.0, 0.0, 1.0];
        assert_eq!(g_from_dipoles([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], z, 1.0).unwrap(), 1.0);
        assert_eq!(g_from_dipoles(z, z, z, 1.0).unwrap(), -2.0);
        let s = (2.0f64 / 3.0).sqrt();
        let magic = [s, 0.0, (1.0f64 / 3.0).sqrt()];
        assert!(g_from_dipoles(magic, magic, z, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn dipole_geometry_errors() {
        let z = [0.0, 0.0, 1.0];
        assert!(g_from_dipoles(z, z, z, 0.0).is_err());
        assert!(g_from_dipoles(z, z, z, -1.0).is_err());
        assert!(g_from_dipoles(z, z, [0.0, 0.0, 1.1], 1.0).is_err());
    }

    #[test]
    fn dipole_geometry_symmetry_and_scaling() {
        let da = [0.3, -1.2, 0.5];
        let db = [0.7, 0.1, -0.4];
        let n = [0.0, 0.6, 0.8];
        let g1 = g_from_dipoles(da, db, n, 1.5).unwrap();
        assert_eq!(g1, g_from_dipoles(db, da, n, 1.5).unwrap());
        let g2 = g_from_dipoles(da, db, n, 3.0).unwrap();
        assert!((g1 / g2 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn completion_fills_partners() {
        let t = GTable::from_generators(2, true, [([0, 1, 0, 1], c(0.1))]).unwrap();
        for idx in [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]] {
            assert_eq!(t.get(idx[0], idx[1], idx[2], idx[3]), c(0.1));
        }
        assert!(t.violations(true, |_, _| true).is_empty());
    }

    #[test]
    fn completion_conjugates_complex_entries() {
        let v = Complex64::new(0.2, 0.3);
        let t = GTable::from_generators(3, false, [([0, 1, 1, 2], v)]).unwrap();
        assert_eq!(t.get(1, 2, 0, 1), v);
        assert_eq!(t.get(1, 0, 2, 1), v.conj());
        assert_eq!(t.get(2, 1, 1, 0), v.conj());
        assert!(t.violations(false, |_, _| true).is_empty());
    }

    #[test]
    fn real_dipole_conflict_rejected() {
        // Under the real-dipole rules g_1212 = g_2121*, so a complex value is self-inconsistent.
        let err = GTable::from_generators(2, true, [([0, 1, 0, 1], Complex64::new(0.1, 0.2))]).unwrap_err();
        assert!(matches!(err, Error::GTable(_)));
    }

    #[test]
    fn hermiticity_breach_reported() {
        let t = GTable::from_raw(2, [([0, 1, 0, 1], c(0.1)), ([1, 0, 1, 0], c(0.2))]).unwrap();
        let bad = t.violations(false, |_, _| true);
        assert!(bad.contains(&[0, 1, 0, 1]));
        assert!(bad.contains(&[1, 0, 1, 0]));
    }

    #[test]
    fn unsupported_transition_reported() {
        let t = GTable::from_generators(3, true, [([0, 2, 0, 2], c(0.1))]).unwrap();
        let bad = t.violations(true, |j, k| (j.min(k), j.max(k)) != (0, 2));
        assert!(bad.contains(&[0, 2, 0, 2]));
    }

    #[test]
    fn geometry_path_is_consistent() {
        let t = gtable_from_geometry(
            3,
            &[((0, 1), [1.0, 0.0, 0.0]), ((1, 2), [0.0, 1.0, 1.0])],
            [0.0, 0.0, 1.0],
            2.0,
        )
        .unwrap();
        assert!((t.get(0, 1, 0, 1).re - 1.0 / 8.0).abs() < 1e-15);
        assert!((t.get(1, 2, 1, 2).re - (2.0 - 3.0) / 8.0).abs() < 1e-15);
        assert!(t.violations(true, |_, _| true).is_empty());
    }

    #[test]
    fn degenerate_index_rejected() {
        assert!(GTable::from_generators(3, true, [([0, 0, 1, 2], c(1.0))]).is_err());
        assert!(GTable::from_generators(3, true, [([0, 3, 1, 2], c(1.0))]).is_err());
    }
}
