use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{Classification, CurveKind, Field, Order, Phase, PhaseGrid, ScanMeta, SeparatrixCurve};
use crate::error::Result;

/// One row per node, `x_jk` varying fastest, values with 17 significant digits.
pub fn write_field_csv(path: &Path, xs: &[f64], ys: &[f64], field: &Field) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x_jk,x_lm,value")?;
    for (iy, y) in ys.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", x, y, field.get(ix, iy))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Gnuplot script drawing a field CSV as a heat map (or a line for a single row).
pub fn gnuplot_script(csv: &str, title: &str, single_row: bool) -> String {
    let body = if single_row {
        format!("set xlabel 'x_jk'\nset ylabel '{title}'\nplot '{csv}' skip 1 using 1:3 with lines notitle\n")
    } else {
        format!(
            "set xlabel 'x_jk'\nset ylabel 'x_lm'\nset cblabel '{title}'\nset size ratio -1\n\
             plot '{csv}' skip 1 using 1:2:3 with image notitle\n"
        )
    };
    format!("set datafile separator ','\nset title '{title}'\n{body}")
}

#[derive(Clone, Debug, Serialize)]
pub struct AxisSummary {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeCount {
    pub kind: CurveKind,
    pub sub: Option<usize>,
    pub order: Order,
    pub edges: usize,
}

/// JSON summary of a scan: provenance, region sizes, edge classification
/// counts and the separatrix polylines.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub meta: ScanMeta,
    pub x_jk: AxisSummary,
    pub x_lm: AxisSummary,
    pub normal_cells: usize,
    pub subregion_cells: Vec<usize>,
    pub unconverged: Vec<(usize, usize)>,
    pub edge_counts: Vec<EdgeCount>,
    pub curves: Vec<SeparatrixCurve>,
    /// Maximum of each detector surface written alongside.
    pub detector_max: BTreeMap<String, f64>,
}

impl Summary {
    pub fn new(
        grid: &PhaseGrid,
        labels: &[Phase],
        classification: &Classification,
        curves: Vec<SeparatrixCurve>,
        detector_max: BTreeMap<String, f64>,
    ) -> Self {
        let axis = |v: &[f64]| AxisSummary {
            from: v[0],
            to: v[v.len() - 1],
            count: v.len(),
        };
        let mut subregion_cells = vec![0; grid.axes.len()];
        for l in labels {
            if let Phase::Sub(s) = l {
                subregion_cells[*s] += 1;
            }
        }
        let mut counts: BTreeMap<(CurveKind, Option<usize>, Order), usize> = BTreeMap::new();
        for e in &classification.edges {
            *counts.entry((e.kind, e.sub, e.order)).or_default() += 1;
        }
        Self {
            meta: grid.meta.clone(),
            x_jk: axis(&grid.xs),
            x_lm: axis(&grid.ys),
            normal_cells: grid.normal_count(),
            subregion_cells,
            unconverged: grid.failures.clone(),
            edge_counts: counts
                .into_iter()
                .map(|((kind, sub, order), edges)| EdgeCount {
                    kind,
                    sub,
                    order,
                    edges,
                })
                .collect(),
            curves,
            detector_max,
        }
    }
}
