//! `mfou`: simulation, estimation and verification for the mixed fractional
//! Ornstein-Uhlenbeck process.

// `!(d <= bound)` also treats NaN as a mismatch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use error::{CliError, EXIT_OK, EXIT_USAGE};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "mfou",
    version,
    about = "Mixed fractional Ornstein-Uhlenbeck lab"
)]
pub struct Cli {
    /// Worker threads for parallel work; results do not depend on it.
    #[arg(long, global = true, env = "MFOU_THREADS")]
    pub threads: Option<usize>,
    /// File of `key = value` lines supplying defaults for flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Simulate a path and write it as a `t,x` CSV.
    Simulate(SimulateArgs),
    /// Whittle estimate from a `t,x` CSV.
    Whittle(WhittleArgs),
    /// Continuous-record maximum likelihood estimate from a short `t,x` CSV.
    Mle(MleArgs),
    /// Fisher information at θ.
    Fisher(FisherArgs),
    /// Monte Carlo study of the Whittle estimator.
    Montecarlo(MonteCarloArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub hurst: f64,
    #[arg(long)]
    pub delta: f64,
    /// Number of steps; the file has n + 1 rows.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Fine steps per output step.
    #[arg(long, default_value_t = 1)]
    pub refine: usize,
    /// Also write the path as gnuplot columns to this file.
    #[arg(long, value_name = "FILE")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    /// Aliasing sum truncation K.
    #[arg(long, default_value_t = 10)]
    pub truncation_k: usize,
    /// Drop the closed-form correction for the aliasing terms beyond K.
    #[arg(long)]
    pub no_tail_correction: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 1.0)]
    pub init_alpha: f64,
    #[arg(long, default_value_t = 0.85)]
    pub init_hurst: f64,
    /// Optimizer iteration budget.
    #[arg(long, default_value_t = 500)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct WhittleArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Expected grid step; checked against the file's time stamps.
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Directory for `periodogram.dat` and `spectral_density.dat` at the estimate.
    #[arg(long, value_name = "DIR")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Write `s,g,dg_dH` at the estimated H over the full horizon to this CSV.
    #[arg(long, value_name = "FILE")]
    pub g_grid: Option<PathBuf>,
    /// Nodes for the `--g-grid` solve.
    #[arg(long, default_value_t = 512)]
    pub g_nodes: usize,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub hurst: f64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Adds the local scaling matrix at this horizon.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Recompute i12 through the complex form and compare.
    #[arg(long)]
    pub crosscheck: bool,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.8)]
    pub hurst: f64,
    #[arg(long, default_value_t = 0.001)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub refine: usize,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Summary JSON file.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-replication estimates as CSV.
    #[arg(long, value_name = "FILE")]
    pub estimates: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    Innovation,
    Fisher,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0.8)]
    pub hurst: f64,
    /// Used by the fisher suite.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Master seed of the Monte Carlo checks.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(args: Vec<OsString>) -> i32 {
    let args = match config::merge_config(&Cli::command(), args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = init_threads(cli.threads).and_then(|()| commands::dispatch(cli.command));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Usage("--threads: must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))
}

fn main() {
    std::process::exit(run(std::env::args_os().collect()));
}
