use std::collections::BTreeMap;

use serde::Serialize;

use super::derivatives::axis_stencil;
use super::{CasimirFields, Derivatives, Field, Phase, PhaseGrid};
use crate::variational::NORMAL_ETA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Separates the normal set from a collective subregion.
    NormalBoundary,
    /// Separates the two collective subregions.
    ModeSwap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    First,
    Second,
    /// A mode swap with neither `δE` nor `δ²E` discontinuous.
    ContinuousUnstable,
    /// Too few clean samples on one side, or no detectable jump at a normal boundary.
    Unclassified,
}

/// Discontinuity rule: a jump counts when it exceeds `factor` times the median
/// absolute difference between adjacent clean collective nodes within
/// `window` nodes of the edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpRule {
    pub factor: f64,
    pub window: usize,
    pub floor: f64,
    /// How far along the crossing line to look for clean samples.
    pub reach: usize,
}

impl Default for JumpRule {
    fn default() -> Self {
        Self {
            factor: 10.0,
            window: 5,
            floor: 1e-12,
            reach: 12,
        }
    }
}

/// A grid edge `a → b` (unit step along one axis) that crosses a separatrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryEdge {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub kind: CurveKind,
    /// Subregion on the collective side of a normal boundary.
    pub sub: Option<usize>,
    pub order: Order,
    /// Edge whose crossing line supplied the jumps; a perpendicular edge at
    /// the same boundary point stands in when this one has too few samples.
    pub probed: ((usize, usize), (usize, usize)),
    pub d_e_jump: Option<f64>,
    pub d_e_threshold: Option<f64>,
    pub d2_e_jump: Option<f64>,
    pub d2_e_threshold: Option<f64>,
}

impl BoundaryEdge {
    fn complete(&self) -> bool {
        self.d_e_jump.is_some()
            && self.d_e_threshold.is_some()
            && self.d2_e_jump.is_some()
            && self.d2_e_threshold.is_some()
    }

    fn decide(&self) -> Order {
        match (
            self.d_e_jump.zip(self.d_e_threshold),
            self.d2_e_jump.zip(self.d2_e_threshold),
        ) {
            (Some((j, t)), _) if j > t => Order::First,
            (Some(_), Some((j, t))) if j > t => Order::Second,
            (Some(_), Some(_)) if self.kind == CurveKind::ModeSwap => Order::ContinuousUnstable,
            _ => Order::Unclassified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub edges: Vec<BoundaryEdge>,
}

impl Classification {
    pub fn count(&self, kind: CurveKind, sub: Option<usize>, order: Order) -> usize {
        self.edges
            .iter()
            .filter(|e| e.kind == kind && e.sub == sub && e.order == order)
            .count()
    }

    pub fn of_kind(&self, kind: CurveKind) -> impl Iterator<Item = &BoundaryEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    fn lookup(&self) -> BTreeMap<EdgeKey, &BoundaryEdge> {
        self.edges.iter().map(|e| (key(e.a, e.b), e)).collect()
    }
}

/// `(ix, iy, axis)` of the edge leaving node `(ix, iy)` in the positive direction.
type EdgeKey = (usize, usize, u8);

fn key(a: (usize, usize), b: (usize, usize)) -> EdgeKey {
    let (p, q) = if (a.1, a.0) <= (b.1, b.0) { (a, b) } else { (b, a) };
    (p.0, p.1, if q.0 != p.0 { 0 } else { 1 })
}

struct Labels<'a> {
    nx: usize,
    ny: usize,
    labels: &'a [Phase],
}

impl Labels<'_> {
    fn at(&self, ix: usize, iy: usize) -> Phase {
        self.labels[iy * self.nx + ix]
    }

    /// Nodes entering the finite-difference `δE` at `(ix, iy)`.
    fn stencil(&self, ix: usize, iy: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let xs = axis_stencil(ix, self.nx)
            .iter()
            .map(move |&o| ((ix as i64 + o) as usize, iy));
        let ys = axis_stencil(iy, self.ny)
            .iter()
            .map(move |&o| (ix, (iy as i64 + o) as usize));
        xs.chain(ys)
    }

    /// Nodes whose `δE` (`depth` 1) or `δ²E` (`depth` 2) stencil stays within
    /// their own region.
    fn mask(&self, depth: usize) -> Vec<bool> {
        let first: Vec<bool> = (0..self.nx * self.ny)
            .map(|i| {
                let (ix, iy) = (i % self.nx, i / self.nx);
                let here = self.at(ix, iy);
                self.stencil(ix, iy).all(|(jx, jy)| self.at(jx, jy) == here)
            })
            .collect();
        if depth < 2 {
            return first;
        }
        (0..self.nx * self.ny)
            .map(|i| {
                let (ix, iy) = (i % self.nx, i / self.nx);
                let here = self.at(ix, iy);
                first[i]
                    && self
                        .stencil(ix, iy)
                        .all(|(jx, jy)| first[jy * self.nx + jx] && self.at(jx, jy) == here)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Line {
    t: f64,
    f: f64,
    slope: f64,
}

impl Line {
    fn at(&self, t: f64) -> f64 {
        self.f + (t - self.t) * self.slope
    }
}

struct Probe<'a> {
    field: &'a Field,
    clean: Vec<bool>,
}

impl Probe<'_> {
    fn is_clean(&self, ix: usize, iy: usize) -> bool {
        self.clean[iy * self.field.nx + ix]
    }

    /// Line through the two nearest clean samples on the side of `start`,
    /// walking away from the edge along `step`. Positions are measured in
    /// steps with `start` at `origin` and `direction` pointing away.
    fn side_line(
        &self,
        labels: &Labels,
        start: (usize, usize),
        step: (i64, i64),
        origin: f64,
        direction: f64,
        reach: usize,
    ) -> Option<Line> {
        let side = labels.at(start.0, start.1);
        let mut samples = Vec::with_capacity(2);
        for t in 0..reach as i64 {
            let (ix, iy) = (start.0 as i64 + t * step.0, start.1 as i64 + t * step.1);
            if ix < 0 || iy < 0 || ix >= labels.nx as i64 || iy >= labels.ny as i64 {
                break;
            }
            let (ix, iy) = (ix as usize, iy as usize);
            if labels.at(ix, iy) != side {
                break;
            }
            if self.is_clean(ix, iy) {
                samples.push((origin + direction * t as f64, self.field.get(ix, iy)));
                if samples.len() == 2 {
                    break;
                }
            }
        }
        let [(t1, f1), (t2, f2)] = samples[..] else {
            return None;
        };
        Some(Line {
            t: t1,
            f: f1,
            slope: (f2 - f1) / (t2 - t1),
        })
    }

    /// Smallest mismatch between the two one-sided extrapolations over the
    /// possible locations of the discontinuity between `a` and `b`.
    fn jump(&self, labels: &Labels, a: (usize, usize), b: (usize, usize), reach: usize) -> Option<f64> {
        let d = (b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64);
        let left = self.side_line(labels, a, (-d.0, -d.1), 0.0, -1.0, reach)?;
        let right = self.side_line(labels, b, d, 1.0, 1.0, reach)?;
        let gap = |t: f64| left.at(t) - right.at(t);
        let (g0, g1) = (gap(0.0), gap(1.0));
        Some(if g0 * g1 <= 0.0 { 0.0 } else { g0.abs().min(g1.abs()) })
    }

    /// Median absolute difference between clean collective nodes one step
    /// apart along `d`, within the window around `a`.
    fn scale(&self, labels: &Labels, a: (usize, usize), d: (usize, usize), rule: &JumpRule) -> Option<f64> {
        let (nx, ny) = (labels.nx, labels.ny);
        let lo = |c: usize| c.saturating_sub(rule.window);
        let (x_hi, y_hi) = ((a.0 + rule.window).min(nx - 1), (a.1 + rule.window).min(ny - 1));
        let mut diffs = Vec::new();
        for iy in lo(a.1)..=y_hi {
            for ix in lo(a.0)..=x_hi {
                let (jx, jy) = (ix + d.0, iy + d.1);
                if jx > x_hi || jy > y_hi || labels.at(ix, iy) == Phase::Normal {
                    continue;
                }
                if self.is_clean(ix, iy) && self.is_clean(jx, jy) && labels.at(jx, jy) == labels.at(ix, iy) {
                    diffs.push((self.field.get(jx, jy) - self.field.get(ix, iy)).abs());
                }
            }
        }
        if diffs.is_empty() {
            return None;
        }
        diffs.sort_by(f64::total_cmp);
        let m = diffs.len();
        let median = if m % 2 == 1 {
            diffs[m / 2]
        } else {
            0.5 * (diffs[m / 2 - 1] + diffs[m / 2])
        };
        Some(rule.factor * median.max(rule.floor))
    }
}

/// Classify every grid edge that crosses the normal boundary or the mode-swap
/// line.
///
/// Each side of an edge is extrapolated linearly from the two nearest samples
/// whose finite-difference stencils stay inside that side's region; the jump
/// is the smallest mismatch of the two lines anywhere along the edge. A normal
/// boundary is first order when `δE` jumps, second
/// order when only `δ²E` jumps. A mode swap with no jump in either is
/// continuous unstable.
pub fn classify_separatrix(
    grid: &PhaseGrid,
    derivatives: &Derivatives,
    casimir: &CasimirFields,
    rule: &JumpRule,
) -> Classification {
    let (nx, ny) = (grid.nx(), grid.ny());
    let fine = Labels {
        nx,
        ny,
        labels: &casimir.labels,
    };
    let mut swaps = Vec::new();
    let mut boundary = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let a = (ix, iy);
            for b in [(ix + 1, iy), (ix, iy + 1)] {
                if b.0 >= nx || b.1 >= ny {
                    continue;
                }
                match (fine.at(a.0, a.1), fine.at(b.0, b.1)) {
                    (la, lb) if la == lb => {}
                    (Phase::Normal, Phase::Sub(s)) | (Phase::Sub(s), Phase::Normal) => boundary.push((a, b, s)),
                    _ => swaps.push((a, b)),
                }
            }
        }
    }

    let mut edges = Vec::with_capacity(swaps.len() + boundary.len());
    let probes = Probes::new(derivatives, &fine);
    for (a, b) in swaps {
        edges.push(probes.classify(&fine, a, b, CurveKind::ModeSwap, None, rule));
    }
    // A mode swap without any derivative jump does not spoil the stencils of
    // the normal boundary, so the two subregions are merged for that pass.
    let smooth = edges.iter().all(|e| !matches!(e.order, Order::First | Order::Second));
    let merged: Vec<Phase> = casimir
        .labels
        .iter()
        .map(|&l| if smooth && l != Phase::Normal { Phase::Sub(0) } else { l })
        .collect();
    let coarse = Labels {
        nx,
        ny,
        labels: &merged,
    };
    let probes = Probes::new(derivatives, &coarse);
    for (a, b, s) in boundary {
        edges.push(probes.classify(&coarse, a, b, CurveKind::NormalBoundary, Some(s), rule));
    }
    borrow_perpendicular(&mut edges);
    Classification { edges }
}

/// An edge running nearly parallel to the separatrix has no clean samples
/// along its own line. It then takes the jumps of a complete perpendicular
/// edge of the same kind sharing one of its nodes.
fn borrow_perpendicular(edges: &mut [BoundaryEdge]) {
    let index: BTreeMap<EdgeKey, usize> = edges.iter().enumerate().map(|(i, e)| (key(e.a, e.b), i)).collect();
    let updates: Vec<(usize, usize)> = edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.complete())
        .filter_map(|(i, e)| {
            let horizontal = e.a.1 == e.b.1;
            let mut candidates = Vec::new();
            for n in [e.a, e.b] {
                if horizontal {
                    candidates.push(key(n, (n.0, n.1 + 1)));
                    if n.1 > 0 {
                        candidates.push(key((n.0, n.1 - 1), n));
                    }
                } else {
                    candidates.push(key(n, (n.0 + 1, n.1)));
                    if n.0 > 0 {
                        candidates.push(key((n.0 - 1, n.1), n));
                    }
                }
            }
            candidates
                .iter()
                .filter_map(|k| index.get(k).copied())
                .find(|&j| edges[j].kind == e.kind && edges[j].complete())
                .map(|j| (i, j))
        })
        .collect();
    for (i, j) in updates {
        let donor = edges[j].clone();
        let e = &mut edges[i];
        e.probed = donor.probed;
        e.d_e_jump = donor.d_e_jump;
        e.d_e_threshold = donor.d_e_threshold;
        e.d2_e_jump = donor.d2_e_jump;
        e.d2_e_threshold = donor.d2_e_threshold;
        e.order = e.decide();
    }
}

struct Probes<'a> {
    first: Probe<'a>,
    second: Probe<'a>,
}

impl<'a> Probes<'a> {
    fn new(derivatives: &'a Derivatives, labels: &Labels) -> Self {
        Self {
            first: Probe {
                field: &derivatives.d_e,
                clean: labels.mask(1),
            },
            second: Probe {
                field: &derivatives.d2_e,
                clean: labels.mask(2),
            },
        }
    }

    fn classify(
        &self,
        labels: &Labels,
        a: (usize, usize),
        b: (usize, usize),
        kind: CurveKind,
        sub: Option<usize>,
        rule: &JumpRule,
    ) -> BoundaryEdge {
        let (first, second) = (&self.first, &self.second);
        let j1 = first.jump(labels, a, b, rule.reach);
        let d = (b.0 - a.0, b.1 - a.1);
        let t1 = first
            .scale(labels, a, d, rule)
            .or_else(|| first.scale(labels, b, d, rule));
        let j2 = second.jump(labels, a, b, rule.reach);
        let t2 = second
            .scale(labels, a, d, rule)
            .or_else(|| second.scale(labels, b, d, rule));
        let mut edge = BoundaryEdge {
            a,
            b,
            kind,
            sub,
            order: Order::Unclassified,
            probed: (a, b),
            d_e_jump: j1,
            d_e_threshold: t1,
            d2_e_jump: j2,
            d2_e_threshold: t2,
        };
        edge.order = edge.decide();
        edge
    }
}

/// An ordered polyline along one separatrix with a uniform label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatrixCurve {
    pub kind: CurveKind,
    pub order: Order,
    /// Collective subregion bordering a normal boundary.
    pub sub: Option<usize>,
    pub points: Vec<[f64; 2]>,
}

/// Marching-squares contour of `field` at `level`. Cells are skipped unless
/// `use_cell` accepts them. Returns ordered chains of edge keys.
fn contour_chains(field: &Field, level: f64, use_cell: impl Fn(usize, usize) -> bool) -> Vec<Vec<EdgeKey>> {
    let (nx, ny) = (field.nx, field.ny);
    let inside = |ix: usize, iy: usize| field.get(ix, iy) < level;
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            if !use_cell(ix, iy) {
                continue;
            }
            let corners = [
                inside(ix, iy),
                inside(ix + 1, iy),
                inside(ix + 1, iy + 1),
                inside(ix, iy + 1),
            ];
            // Cell edges: bottom, right, top, left; edge e joins corners e and e+1.
            let sides: [EdgeKey; 4] = [(ix, iy, 0), (ix + 1, iy, 1), (ix, iy + 1, 0), (ix, iy, 1)];
            let crossing: Vec<usize> = (0..4).filter(|&e| corners[e] != corners[(e + 1) % 4]).collect();
            match crossing.len() {
                2 => segments.push((sides[crossing[0]], sides[crossing[1]])),
                4 => {
                    let centre = 0.25
                        * (field.get(ix, iy)
                            + field.get(ix + 1, iy)
                            + field.get(ix + 1, iy + 1)
                            + field.get(ix, iy + 1));
                    // Cut off the two corners that disagree with the centre.
                    if (centre < level) == corners[0] {
                        segments.push((sides[0], sides[1]));
                        segments.push((sides[2], sides[3]));
                    } else {
                        segments.push((sides[3], sides[0]));
                        segments.push((sides[1], sides[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut touching: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (i, (p, q)) in segments.iter().enumerate() {
        touching.entry(*p).or_default().push(i);
        touching.entry(*q).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    let walk = |start: EdgeKey, first: usize, used: &mut Vec<bool>| {
        let mut chain = vec![start];
        let (mut at, mut seg) = (start, first);
        loop {
            used[seg] = true;
            let (p, q) = segments[seg];
            let next = if p == at { q } else { p };
            chain.push(next);
            at = next;
            match touching[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };
    // Open chains start at an end touched by a single segment; the rest are loops.
    for (&k, segs) in &touching {
        if segs.len() == 1 && !used[segs[0]] {
            chains.push(walk(k, segs[0], &mut used));
        }
    }
    for i in 0..segments.len() {
        if !used[i] {
            chains.push(walk(segments[i].0, i, &mut used));
        }
    }
    chains
}

fn edge_nodes(k: EdgeKey) -> ((usize, usize), (usize, usize)) {
    let (ix, iy, axis) = k;
    ((ix, iy), if axis == 0 { (ix + 1, iy) } else { (ix, iy + 1) })
}

/// Trace the normal boundary (`E_min = −η`) and the mode-swap line
/// (`⟨C_a − C_b⟩ = 0` over fully collective cells) as polylines, split into
/// runs of constant order.
pub fn extract_separatrix(
    grid: &PhaseGrid,
    casimir: &CasimirFields,
    classification: &Classification,
) -> Vec<SeparatrixCurve> {
    let lookup = classification.lookup();
    let nx = grid.nx();
    let collective = |ix: usize, iy: usize| casimir.labels[iy * nx + ix] != Phase::Normal;
    let point = |field: &Field, level: f64, k: EdgeKey| -> [f64; 2] {
        let (p, q) = edge_nodes(k);
        let (fp, fq) = (field.get(p.0, p.1), field.get(q.0, q.1));
        let t = if fq != fp {
            ((level - fp) / (fq - fp)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        let (xp, yp) = (grid.xs[p.0], grid.ys[p.1]);
        let (xq, yq) = (grid.xs[q.0], grid.ys[q.1]);
        [xp + t * (xq - xp), yp + t * (yq - yp)]
    };

    let mut curves = Vec::new();
    let mut emit = |chains: Vec<Vec<EdgeKey>>, field: &Field, level: f64, kind: CurveKind| {
        for chain in chains {
            let mut current: Option<SeparatrixCurve> = None;
            for k in chain {
                let (order, sub) = lookup.get(&k).map_or((Order::Unclassified, None), |e| (e.order, e.sub));
                let p = point(field, level, k);
                match current.as_mut() {
                    Some(c) if c.order == order && c.sub == sub => {
                        if c.points.last() != Some(&p) {
                            c.points.push(p);
                        }
                    }
                    _ => {
                        if let Some(done) = current.take() {
                            curves.push(done);
                        }
                        current = Some(SeparatrixCurve {
                            kind,
                            order,
                            sub,
                            points: vec![p],
                        });
                    }
                }
            }
            curves.extend(current);
        }
    };

    let level = -NORMAL_ETA;
    emit(
        contour_chains(&grid.energy, level, |_, _| true),
        &grid.energy,
        level,
        CurveKind::NormalBoundary,
    );
    if grid.axes.len() == 2 {
        let swap = contour_chains(&casimir.signed, 0.0, |ix, iy| {
            collective(ix, iy) && collective(ix + 1, iy) && collective(ix + 1, iy + 1) && collective(ix, iy + 1)
        });
        emit(swap, &casimir.signed, 0.0, CurveKind::ModeSwap);
    }
    curves
}
