mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use planted_qubo::planting::VerifyMode;
use planted_qubo::{CsetTag, Milli};

/// Planted-solution QUBO generator, solvers and benchmark scoring.
#[derive(Debug, Parser)]
#[command(name = "planted-qubo", version)]
struct Cli {
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate certified planted instances.
    Generate(GenerateArgs),
    /// Sample an instance with simulated annealing over a sweep grid.
    SolveSa(SolveSaArgs),
    /// Solve a QUBO or instance exactly.
    SolveExact(SolveExactArgs),
    /// Check that an instance's planted assignment is its unique optimum.
    Verify(VerifyArgs),
    /// Run an SA sweep grid over a directory of instances and score it.
    Bench(BenchArgs),
    /// Score existing solve-sa outputs against their instances.
    Report(ReportArgs),
    /// Convert a QUBO or instance to COO text or canonical QUBO JSON.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// `chimera:M,N,T` or `file:PATH` (edge list).
    #[arg(long)]
    pub topology: String,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value = "lin2")]
    pub cset: CsetTag,
    /// Posiform scale factor, a decimal with at most three fractional digits.
    #[arg(long, default_value = "0.1")]
    pub alpha: Milli,
    #[arg(long, default_value_t = 50)]
    pub max_part_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Clauses added between uniqueness checks [default: max(32, ceil(n/10))].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Edge-clause budget before planting gives up [default: 10 * edges].
    #[arg(long)]
    pub max_clauses: Option<usize>,
    /// Seconds allowed per exact sub-solve.
    #[arg(long, default_value_t = 60.0)]
    pub sub_solver_limit: f64,
    /// Fail on degree-0 nodes instead of pinning them with unit clauses.
    #[arg(long)]
    pub no_unit_clauses: bool,
    /// Exhaustively verify instances with at most this many variables (0 disables).
    #[arg(long, default_value_t = 26)]
    pub brute_force_cap: usize,
}

#[derive(Debug, Args)]
pub struct SolveSaArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    pub sweeps: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub reads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveExactArgs {
    /// QUBO JSON or planted instance JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "bnb")]
    pub method: ExactMethod,
    /// Seconds for branch and bound.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
    /// Report every minimizer (brute force only).
    #[arg(long)]
    pub all: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ExactMethod {
    Bnb,
    BruteForce,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "flip-scan")]
    pub mode: VerifyMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    pub sweeps: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub reads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run branch and bound with this many seconds per instance.
    #[arg(long)]
    pub exact_time_limit: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub instances: PathBuf,
    /// Directory holding solve-sa outputs.
    #[arg(long)]
    pub results: PathBuf,
    /// Where to write results.csv and summary.json [default: the results directory].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "coo")]
    pub format: ExportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ExportFormat {
    Coo,
    Json,
}

/// Marks a run whose inputs were fine but whose checks failed (exit 1).
/// Every other error is a usage, input or parse problem (exit 2).
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::SolveSa(a) => commands::solve_sa(&a),
        Command::SolveExact(a) => commands::solve_exact(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Report(a) => commands::report(&a),
        Command::Export(a) => commands::export(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<CheckFailed>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
