//! Command-line front end for `distorder`.
//!
//! Exit codes: 0 every requested order holds, 1 an order is violated,
//! 2 invalid input, 3 a preservation sweep found a failure, 4 I/O failure.

pub mod output;
pub mod reproduce;
pub mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use distorder::forms::{parse_copula, parse_distortion, parse_distribution};
use distorder::orders::{check_order, OrderVerdict};
use distorder::sweep::{run_sweep, Suite};
use distorder::systems::{all_advice, classify_system, system_distortion_on, Advice};
use distorder::{Grid, GridSpec, MinimalSignature, OrderKind, ShapeReport, SweepConfig, Tolerance};
use serde::Serialize;
use thiserror::Error;

use crate::output::{curve_csv, describe_grid, to_json, write_artifacts, Artifact};
use crate::reproduce::{reproduce, ReproTarget};
use crate::scenario::{OutputKind, Scenario};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SWEEP_FAILED: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] distorder::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Core(_) => EXIT_INPUT,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn core<E: Into<distorder::Error>>(e: E) -> CliError {
    CliError::Core(e.into())
}

#[derive(Debug, Parser)]
#[command(name = "distorder", version, about = "Stochastic orders under distortion and coherent-system distortions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check stochastic orders between two distributions, optionally after distorting both.
    CheckOrder(CheckOrderArgs),
    /// Classify a distortion, or the distortion of a coherent system.
    Classify(ClassifyArgs),
    /// Tabulate the quantile function of a distorted distribution.
    Distort(DistortArgs),
    /// Tabulate and classify the distortion of a coherent system.
    System(SystemArgs),
    /// Regenerate the curves and verdicts of a worked example.
    Reproduce(ReproduceArgs),
    /// Run randomized preservation trials.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Number of grid points on (0, 1).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Distance of the first and last grid points from 0 and 1.
    #[arg(long)]
    pub edge_margin: Option<f64>,
}

impl GridArgs {
    fn grid(&self) -> Result<Grid, CliError> {
        let count = self.grid_points.unwrap_or(Grid::DEFAULT_COUNT);
        let margin = self.edge_margin.unwrap_or(Grid::DEFAULT_MARGIN);
        Grid::uniform(0.0, 1.0, count, margin).map_err(core)
    }
}

#[derive(Debug, Args)]
pub struct CheckOrderArgs {
    /// Scenario JSON; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    /// Distribution of X, e.g. `exp:1`, `q:p^2`, `hazard:x^2`.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Orders to check: ttt, ew, dmrl, qmit, convex_transform, star.
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<OrderKind>,
    /// Distortion applied to both distributions.
    #[arg(long)]
    pub distort: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Directory for the verdict JSON and curve CSV files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// A distortion, e.g. `p^5`, `power:2`, `dualpower:3`.
    #[arg(long, conflicts_with_all = ["signature", "copula"])]
    pub h: Option<String>,
    /// Minimal signature, e.g. `2,0,-2,1`.
    #[arg(long, requires = "copula")]
    pub signature: Option<String>,
    /// e.g. `durante:f=p^0.5,n=4` or `diagonal:d=2*p^2-p^3,n=5`.
    #[arg(long, requires = "signature")]
    pub copula: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub h: String,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub signature: String,
    #[arg(long)]
    pub copula: String,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Directory for `h_T.csv` and `classification.json`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub target: ReproTarget,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep configuration JSON; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    /// Also write the summary JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a command, writing its main output to `out`, and returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::CheckOrder(a) => check_order_cmd(a, out),
        Command::Classify(a) => classify_cmd(a, out),
        Command::Distort(a) => distort_cmd(a, out),
        Command::System(a) => system_cmd(a, out),
        Command::Reproduce(a) => reproduce_cmd(a, out),
        Command::Sweep(a) => sweep_cmd(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
pub struct VerdictReport<'a> {
    pub scenario: &'a str,
    pub order: OrderKind,
    pub holds: bool,
    pub witnesses: &'a [distorder::orders::Witness],
    pub grid: &'a GridSpec,
    pub tolerances: Tolerance,
    #[serde(skip_serializing_if = "<[f64]>::is_empty")]
    pub excluded: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<&'a distorder::orders::CrossCheck>,
}

impl<'a> VerdictReport<'a> {
    fn new(scenario: &'a str, v: &'a OrderVerdict) -> Self {
        VerdictReport {
            scenario,
            order: v.kind,
            holds: v.holds,
            witnesses: &v.witnesses,
            grid: &v.grid,
            tolerances: v.tolerance,
            excluded: &v.excluded,
            cross_check: v.cross_check.as_ref(),
        }
    }
}

fn check_order_cmd(a: CheckOrderArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let base = match &a.config {
        Some(path) => read_json::<Scenario>(path)?,
        None => Scenario::default(),
    };
    let s = base.merge(&a)?;
    let grid = s.grid()?;
    let (mut x, mut y) = (parse_distribution(&s.x).map_err(core)?, parse_distribution(&s.y).map_err(core)?);
    if let Some(h) = &s.distortion {
        let h = parse_distortion(h).map_err(core)?;
        x = x.distort(&h);
        y = y.distort(&h);
    }
    let verdicts = s.orders.iter().map(|&k| check_order(&x, &y, k, &grid)).collect::<Result<Vec<_>, _>>().map_err(core)?;
    let reports: Vec<VerdictReport> = verdicts.iter().map(|v| VerdictReport::new(&s.name, v)).collect();
    emit(out, &to_json(&reports))?;

    if let Some(dir) = &a.out_dir {
        let mut files = Vec::new();
        for (v, r) in verdicts.iter().zip(&reports) {
            let stem = format!("{}_{}", s.name, v.kind);
            if s.outputs.contains(&OutputKind::VerdictJson) {
                files.push(Artifact::json(format!("{stem}.json"), r));
            }
            if s.outputs.contains(&OutputKind::CurveCsv) {
                let rows = v.curve.iter().map(|c| (c.p, c.functional));
                files.push(Artifact::new(format!("{stem}.csv"), curve_csv("p", v.kind.functional(), &describe_grid(&v.grid), rows)));
            }
        }
        write_artifacts(dir, &files)?;
    }
    Ok(if verdicts.iter().all(|v| v.holds) { EXIT_OK } else { EXIT_VIOLATED })
}

#[derive(Debug, Serialize)]
struct DistortionReport {
    distortion: String,
    shape: ShapeReport,
    advice: Vec<Advice>,
}

fn classify_cmd(a: ClassifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let grid = a.grid.grid()?;
    let json = match (&a.h, &a.signature, &a.copula) {
        (Some(h), None, None) => {
            let h = parse_distortion(h).map_err(core)?;
            let shape = h.classify(&grid);
            to_json(&DistortionReport { distortion: h.label().to_string(), advice: all_advice(&shape), shape })
        }
        (None, Some(sig), Some(copula)) => {
            let sys = system(sig, copula, &grid)?;
            to_json(&classify_system(&sys, &grid).map_err(core)?)
        }
        _ => return Err(CliError::Input("give either --h or both --signature and --copula".into())),
    };
    emit(out, &json)?;
    Ok(EXIT_OK)
}

fn system(sig: &str, copula: &str, grid: &Grid) -> Result<distorder::systems::SystemDistortion, CliError> {
    let sig = MinimalSignature::parse(sig).map_err(core)?;
    let copula = parse_copula(copula, Some(sig.len()), grid).map_err(core)?;
    system_distortion_on(&sig, &copula, grid).map_err(core)
}

fn distort_cmd(a: DistortArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let grid = a.grid.grid()?;
    let x = parse_distribution(&a.x).map_err(core)?;
    let h = parse_distortion(&a.h).map_err(core)?;
    let xh = x.distort(&h);
    let title = format!("quantile of {} distorted by {}", x.label(), h.label());
    let csv = curve_csv("p", &title, &describe_grid(&grid.spec()), grid.points().iter().map(|&p| (p, xh.quantile(p))));
    match &a.out {
        Some(path) => std::fs::write(path, csv).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => emit(out, &csv)?,
    }
    Ok(EXIT_OK)
}

fn system_cmd(a: SystemArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let grid = a.grid.grid()?;
    let sys = system(&a.signature, &a.copula, &grid)?;
    let classification = to_json(&classify_system(&sys, &grid).map_err(core)?);
    let title = format!("h_T(p) for signature ({}) on {}", sys.signature, sys.copula);
    let csv = curve_csv("p", &title, &describe_grid(&grid.spec()), grid.points().iter().map(|&p| (p, sys.h.eval(p))));
    match &a.out_dir {
        Some(dir) => {
            write_artifacts(dir, &[Artifact::new("h_T.csv", csv), Artifact::new("classification.json", classification.clone())])?;
            emit(out, &classification)?;
        }
        None => {
            emit(out, &classification)?;
            emit(out, &csv)?;
        }
    }
    Ok(EXIT_OK)
}

fn reproduce_cmd(a: ReproduceArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let r = reproduce(a.target).map_err(CliError::Core)?;
    write_artifacts(&a.out_dir, &r.artifacts)?;
    emit(out, &to_json(&r.summary))?;
    Ok(EXIT_OK)
}

fn sweep_cmd(a: SweepArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut config = match &a.config {
        Some(path) => read_json::<SweepConfig>(path)?,
        None => SweepConfig::default(),
    };
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.trials {
        config.trials = v;
    }
    if let Some(v) = a.grid_points {
        config.grid_points = v;
    }
    if let Some(v) = a.margin {
        config.margin = v;
    }
    if !a.suite.is_empty() {
        config.suites = a.suite.clone();
    }
    let summary = run_sweep(&config).map_err(CliError::Core)?;
    let json = to_json(&summary);
    if let Some(path) = &a.out {
        std::fs::write(path, &json).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    emit(out, &json)?;
    Ok(if summary.all_passed() { EXIT_OK } else { EXIT_SWEEP_FAILED })
}
