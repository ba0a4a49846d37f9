//! The `ddphase` command line: argument types and the artifact-writing runs.

mod args;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

pub use args::{Cli, Command, ModelArgs, OracleArgs, Output, Point, Range, ScanArgs, SelftestArgs, TwoLevelArgs};

use crate::algebra::algebra_selftest;
use crate::error::{Error, Result};
use crate::model::{configuration, load_model, named_configuration, GRow, ModelFile, ModelSpec};
use crate::oracle::{brute_min, exact_ground, ExactOptions};
use crate::phase::{
    casimir_fields, classify_separatrix, derivative_fields, detectors, extract_separatrix, gnuplot_script, linspace,
    scan_ground, write_field_csv, Classification, DetectorContext, JumpRule, Phase, ScanMeta, ScanOptions, Summary,
};
use crate::two_level::{classify_2level, sweep, two_level_model, x_critical, y_from_g};
use crate::variational::{minimize_ground, MinimizeOptions, NORMAL_ETA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    if err.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERIC
    }
}

/// Everything needed to rerun a command.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub program: &'static str,
    pub version: &'static str,
    pub invocation: Command,
    /// The resolved model, symmetry-completed, when the command uses one.
    pub model: Option<ModelFile>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
    pub result: Value,
}

#[derive(Debug)]
pub struct Outcome {
    pub manifest: PathBuf,
    pub result: Value,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.path(name);
        std::fs::write(path, body)?;
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let body = serde_json::to_string_pretty(value)?;
        self.text(name, &(body + "\n"))
    }
}

/// Run one command and write its artifacts and manifest.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let output = cli.command.output();
    match output.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(cli))
        }
        None => run_inner(cli),
    }
}

fn run_inner(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let output = cli.command.output();
    let mut art = Artifacts::new(&output.out)?;
    let (model, result) = match &cli.command {
        Command::TwoLevel(a) => (None, two_level(a, &mut art)?),
        Command::Scan(a) | Command::Separatrix(a) | Command::Bures(a) | Command::Casimir(a) => {
            let (model, result) = scan(cli.command.name(), a, &mut art)?;
            (Some(model), result)
        }
        Command::Oracle(a) => {
            let (model, result) = oracle(a, &mut art)?;
            (Some(model), result)
        }
        Command::Selftest(a) => (None, selftest(a, &mut art)?),
    };
    let manifest_path = art.dir.join("manifest.json");
    let manifest = Manifest {
        program: "ddphase",
        version: env!("CARGO_PKG_VERSION"),
        invocation: cli.command.clone(),
        model: model.as_ref().map(ModelFile::from_spec),
        seed: output.seed,
        threads: output.threads,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts: art.files.clone(),
        result: result.clone(),
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    if let Some(msg) = result.get("failure").and_then(Value::as_str) {
        return Err(Error::Numeric(msg.to_string()));
    }
    Ok(Outcome {
        manifest: manifest_path,
        result,
    })
}

/// Tabulated row name or an explicit `g_jkjk,g_lmlm,g_jklm` triple.
pub fn parse_grow(text: &str) -> Result<GRow> {
    if text.contains(',') {
        let v: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::UnknownGRow(text.to_string()))?;
        return match v[..] {
            [a, b, c] => Ok(GRow::new(text, a, b, c)),
            _ => Err(Error::UnknownGRow(text.to_string())),
        };
    }
    GRow::named(text)
}

/// One-based transitions such as `1-2,2-3`, returned zero-based.
pub fn parse_axes(text: &str) -> Result<Vec<(usize, usize)>> {
    let bad = || Error::InvalidInput(format!("axes must look like `1-2,2-3`, got `{text}`"));
    text.split(',')
        .map(|t| {
            let (a, b) = t.trim().split_once('-').ok_or_else(bad)?;
            let a: usize = a.parse().map_err(|_| bad())?;
            let b: usize = b.parse().map_err(|_| bad())?;
            if a == 0 || b == 0 || a == b {
                return Err(bad());
            }
            Ok(((a - 1).min(b - 1), (a - 1).max(b - 1)))
        })
        .collect()
}

pub struct ResolvedModel {
    pub template: ModelSpec,
    pub axes: Vec<(usize, usize)>,
    pub row: Option<GRow>,
    pub mid: Option<f64>,
}

/// A named configuration with its g row, or a model file plus scan axes.
pub fn resolve_model(args: &ModelArgs) -> Result<ResolvedModel> {
    let path = Path::new(&args.config);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        let template = load_model(path)?;
        let axes = match &args.axes {
            Some(text) => parse_axes(text)?,
            None => configuration(&template.config)
                .map(|c| c.axes.to_vec())
                .map_err(|_| Error::InvalidInput("a custom model file needs --axes".into()))?,
        };
        return Ok(ResolvedModel {
            template,
            axes,
            row: None,
            mid: None,
        });
    }
    let cfg = configuration(&args.config)?;
    let row = parse_grow(&args.grow)?;
    let template = named_configuration(cfg.name, args.mid, &row, [0.0, 0.0])?;
    let mid = cfg.default_mid.map(|d| args.mid.unwrap_or(d));
    let axes = match &args.axes {
        Some(text) => parse_axes(text)?,
        None => cfg.axes.to_vec(),
    };
    Ok(ResolvedModel {
        template,
        axes,
        row: Some(row),
        mid,
    })
}

fn two_level(a: &TwoLevelArgs, art: &mut Artifacts) -> Result<Value> {
    let step = a.x.step.unwrap_or(1e-3);
    let y = y_from_g(a.g, 1.0);
    let samples = sweep(a.x.from, a.x.to, step, y, 1.0);
    let opts = MinimizeOptions {
        seed: a.output.seed,
        ..MinimizeOptions::default()
    };
    let mut csv = String::from("x,E_min,dE,d2E,E_numeric\n");
    let mut onset = None;
    for s in &samples {
        let numeric = minimize_ground(&two_level_model(s.x, a.g)?, &opts)?.energy;
        if onset.is_none() && numeric < -NORMAL_ETA {
            onset = Some(s.x);
        }
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.x, s.e, s.de, s.d2e, numeric
        ));
    }
    art.text("two_level.csv", &csv)?;
    art.text(
        "two_level.gp",
        "set datafile separator ','\nset title 'two-level minimum energy'\nset xlabel 'x'\n\
         plot 'two_level.csv' skip 1 using 1:2 with lines title 'E_min', \
         '' skip 1 using 1:3 with lines dt 2 title 'dE/dx', '' skip 1 using 1:4 with lines title 'd2E/dx2'\n",
    )?;
    Ok(json!({
        "g": a.g,
        "y": y,
        "x_c": x_critical(y),
        "x_c_numeric": onset,
        "step": step,
        "transition": classify_2level(y, 1.0, step),
    }))
}

fn scan_axis(range: &Range, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidInput("grid needs at least one node".into()));
    }
    Ok(linspace(range.from, range.to, count))
}

fn scan(kind: &str, a: &ScanArgs, art: &mut Artifacts) -> Result<(ModelSpec, Value)> {
    let m = resolve_model(&a.model)?;
    let xs = scan_axis(&a.x_range, a.grid)?;
    let ys = if m.axes.len() == 1 {
        vec![0.0]
    } else {
        scan_axis(&a.y_range, a.grid_y.unwrap_or(a.grid))?
    };
    let opts = ScanOptions {
        minimize: MinimizeOptions {
            seed: a.output.seed,
            ..MinimizeOptions::default()
        },
        warm: !a.cold,
    };
    let meta = ScanMeta {
        config: m.template.config.clone(),
        g_row: m.row.as_ref().map(|r| r.name.clone()),
        mid: m.mid,
        seed: a.output.seed,
        axes: m.axes.iter().map(|&(j, k)| [j + 1, k + 1]).collect(),
    };
    let grid = scan_ground(&m.template, &m.axes, &xs, &ys, &opts, meta)?;
    let eps = a.eps.unwrap_or(if xs.len() > 1 { xs[1] - xs[0] } else { 1e-3 });

    let wanted: &[&str] = match kind {
        "separatrix" => &["E_min", "dE", "d2E"],
        "bures" => &["bures"],
        "casimir" => &["dC"],
        _ => &["E_min", "dE", "d2E", "dC", "bures"],
    };
    let ctx = DetectorContext {
        grid: &grid,
        casimir_atoms: a.casimir_na,
        bures_atoms: a.na,
        eps,
    };
    let mut detector_max = BTreeMap::new();
    for d in detectors()
        .iter()
        .filter(|d| wanted.contains(&d.name()) && d.applies(&grid))
    {
        let field = d.compute(&ctx)?;
        let csv = format!("{}.csv", d.name());
        write_field_csv(&art.path(&csv), &xs, &ys, &field)?;
        art.text(
            &format!("{}.gp", d.name()),
            &gnuplot_script(&csv, d.describe(), ys.len() == 1),
        )?;
        detector_max.insert(d.name().to_string(), field.max());
    }

    let (labels, classification, curves) = if grid.axes.len() == 2 {
        let casimir = casimir_fields(&grid, a.casimir_na)?;
        let derivatives = derivative_fields(&grid)?;
        let classification = classify_separatrix(&grid, &derivatives, &casimir, &JumpRule::default());
        let curves = extract_separatrix(&grid, &casimir, &classification);
        (casimir.labels, classification, curves)
    } else {
        let labels = grid
            .cells
            .iter()
            .map(|c| if c.is_normal() { Phase::Normal } else { Phase::Sub(0) })
            .collect();
        (labels, Classification { edges: Vec::new() }, Vec::new())
    };
    let summary = Summary::new(&grid, &labels, &classification, curves, detector_max);
    if matches!(kind, "scan" | "separatrix") {
        art.json("separatrix.json", &summary)?;
    }
    let result = json!({
        "normal_cells": summary.normal_cells,
        "subregion_cells": summary.subregion_cells,
        "unconverged": summary.unconverged.len(),
        "edge_counts": summary.edge_counts,
        "detector_max": summary.detector_max,
    });
    Ok((m.template, result))
}

fn oracle(a: &OracleArgs, art: &mut Artifacts) -> Result<(ModelSpec, Value)> {
    let m = resolve_model(&a.model)?;
    let model = m.template.with_axes(&m.axes, &a.at.0[..m.axes.len().min(2)]);
    let var = minimize_ground(
        &model,
        &MinimizeOptions {
            seed: a.output.seed,
            ..MinimizeOptions::default()
        },
    )?;
    let exact = exact_ground(&model, a.na, a.cutoffs.as_deref(), &ExactOptions::default())?;
    let brute = if a.resolution > 0 && model.levels <= 3 {
        Some(brute_min(&model, a.resolution)?)
    } else {
        None
    };
    let verdict = json!({
        "E_var": var.energy,
        "E_exact": exact.energy,
        "gap": var.energy - exact.energy,
        "cutoffs": exact.cutoffs,
        "converged": exact.converged,
        "shift": exact.shift,
        "dim": exact.dim,
        "solver": exact.solver,
        "brute": brute,
    });
    art.json("oracle.json", &verdict)?;
    Ok((model, verdict))
}

fn selftest(a: &SelftestArgs, art: &mut Artifacts) -> Result<Value> {
    let report = algebra_selftest(a.levels, a.na, a.tol)?;
    art.json("selftest.json", &report)?;
    let mut value = serde_json::to_value(&report)?;
    value["passed"] = json!(report.passed());
    if !report.passed() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name).collect();
        value["failure"] = json!(format!("algebra identities failed: {}", names.join(", ")));
    }
    Ok(value)
}
