use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// `from:to` or `from:to:step`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub from: f64,
    pub to: f64,
    pub step: Option<f64>,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        let range = match parts[..] {
            [from, to] => Range { from, to, step: None },
            [from, to, step] => Range {
                from,
                to,
                step: Some(step),
            },
            _ => return Err(format!("expected from:to or from:to:step, got `{s}`")),
        };
        if !(range.to >= range.from) || range.step.is_some_and(|h| !(h > 0.0)) {
            return Err(format!("range `{s}` must be increasing with a positive step"));
        }
        Ok(range)
    }
}

/// A point `x_jk,x_lm` of the coupling plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point(pub [f64; 2]);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [x] => Ok(Point([x, 0.0])),
            [x, y] => Ok(Point([x, y])),
            _ => Err(format!("expected x or x,y, got `{s}`")),
        }
    }
}

#[derive(Parser, Debug, Clone, Serialize)]
#[command(
    name = "ddphase",
    version,
    about = "Variational phase diagrams of n-level atoms with dipole-dipole interactions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form single-transition sweep and its critical coupling.
    TwoLevel(TwoLevelArgs),
    /// Full scan: energy, derivative, Casimir and Bures surfaces plus separatrix.
    Scan(ScanArgs),
    /// Scan and classify the separatrix only.
    Separatrix(ScanArgs),
    /// Scan and write the Bures ridge.
    Bures(ScanArgs),
    /// Scan and write the Casimir difference.
    Casimir(ScanArgs),
    /// Compare the variational energy with exact diagonalisation at one point.
    Oracle(OracleArgs),
    /// Check the collective-operator algebra numerically.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Output {
    /// Output directory, created if missing.
    #[arg(long, default_value = "ddphase-out")]
    pub out: PathBuf,
    /// Seed for the multistart minimiser.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for grid scans (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TwoLevelArgs {
    /// Dipole-dipole pair strength `g = g_1212 + g_1221`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub g: f64,
    /// Coupling sweep `from:to:step`.
    #[arg(long, default_value = "0:3:0.001")]
    pub x: Range,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    /// Named configuration or path to a JSON model file.
    #[arg(long, default_value = "V")]
    pub config: String,
    /// Dipole-dipole row: g0, g±1, g±2, g±3, or explicit `g_jkjk,g_lmlm,g_jklm`.
    #[arg(long, default_value = "g0", allow_hyphen_values = true)]
    pub grow: String,
    /// Middle level energy for 3- and 4-level configurations.
    #[arg(long)]
    pub mid: Option<f64>,
    /// Scanned transitions for a model file, one-based, e.g. `1-2,2-3`.
    #[arg(long)]
    pub axes: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Nodes per axis.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// Nodes along `x_lm` when different from `--grid`.
    #[arg(long)]
    pub grid_y: Option<usize>,
    /// Range of `x_jk`.
    #[arg(long, default_value = "0:3")]
    pub x_range: Range,
    /// Range of `x_lm`.
    #[arg(long, default_value = "0:3")]
    pub y_range: Range,
    /// Atom number for the Bures distance.
    #[arg(long, default_value_t = 5000.0)]
    pub na: f64,
    /// Atom number for the Casimir expectations.
    #[arg(long, default_value_t = 2.0)]
    pub casimir_na: f64,
    /// Bures offset (default: one grid step).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Skip the neighbour-seeded second pass.
    #[arg(long)]
    pub cold: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Point of the coupling plane, `x_jk,x_lm`.
    #[arg(long, default_value = "1.5,1.0")]
    pub at: Point,
    /// Number of atoms.
    #[arg(long, default_value_t = 2)]
    pub na: usize,
    /// Photon cutoffs per mode (default: sized from the variational field).
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<usize>>,
    /// Grid points per angle for the brute-force minimum (0 skips it).
    #[arg(long, default_value_t = 400)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Number of atoms.
    #[arg(long, default_value_t = 3)]
    pub na: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::TwoLevel(a) => &a.output,
            Command::Scan(a) | Command::Separatrix(a) | Command::Bures(a) | Command::Casimir(a) => &a.output,
            Command::Oracle(a) => &a.output,
            Command::Selftest(a) => &a.output,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::TwoLevel(_) => "two-level",
            Command::Scan(_) => "scan",
            Command::Separatrix(_) => "separatrix",
            Command::Bures(_) => "bures",
            Command::Casimir(_) => "casimir",
            Command::Oracle(_) => "oracle",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            "0:3:0.5".parse::<Range>().unwrap(),
            Range {
                from: 0.0,
                to: 3.0,
                step: Some(0.5)
            }
        );
        assert_eq!("1:2".parse::<Range>().unwrap().step, None);
        assert!("3:1".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
        assert!("0".parse::<Range>().is_err());
    }

    #[test]
    fn points() {
        assert_eq!("2,0.5".parse::<Point>().unwrap(), Point([2.0, 0.5]));
        assert_eq!("1.2".parse::<Point>().unwrap(), Point([1.2, 0.0]));
        assert!("a,b".parse::<Point>().is_err());
    }

    #[test]
    fn parses_scan_flags() {
        let cli = Cli::try_parse_from([
            "ddphase", "scan", "--config", "V", "--grow", "g3", "--grid", "21", "--seed", "4",
        ])
        .unwrap();
        match cli.command {
            Command::Scan(a) => {
                assert_eq!(a.grid, 21);
                assert_eq!(a.model.grow, "g3");
                assert_eq!(a.output.seed, 4);
            }
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["ddphase", "scan", "--grow", "g-3"]).unwrap();
        assert!(matches!(cli.command, Command::Scan(a) if a.model.grow == "g-3"));
    }
}
