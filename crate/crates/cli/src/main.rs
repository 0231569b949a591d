//! `kmsel`: selective p-values for k-means clusters from the command line.

mod cmd_estimate;
mod cmd_simulate;
mod error;
mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "kmsel",
    version,
    about = "Selective inference after k-means clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a CSV matrix and test differences between cluster means.
    Test(TestArgs),
    /// Run a Monte Carlo Type I error or power experiment.
    Simulate(SimulateArgs),
    /// Estimate the noise standard deviation of a CSV matrix.
    EstimateSigma(EstimateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EstimatorArg {
    Med,
    Sample,
}

#[derive(Args)]
pub struct TestArgs {
    /// CSV file, one observation per row.
    pub data: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
    /// Pair of clusters to test (one-based labels).
    #[arg(long, num_args = 2, value_names = ["K1", "K2"], conflicts_with = "all_pairs")]
    pub pair: Option<Vec<usize>>,
    /// Test every pair of clusters.
    #[arg(long)]
    pub all_pairs: bool,
    /// Known noise standard deviation.
    #[arg(long, conflicts_with_all = ["sigma_estimator", "cov"])]
    pub sigma: Option<f64>,
    /// Estimate the noise standard deviation from the data.
    #[arg(long, value_enum, conflicts_with = "cov")]
    pub sigma_estimator: Option<EstimatorArg>,
    /// Known q x q covariance matrix (CSV).
    #[arg(long)]
    pub cov: Option<PathBuf>,
    /// Ridge added to the covariance eigenvalues.
    #[arg(long, default_value_t = 0.0, requires = "cov")]
    pub ridge: f64,
    /// Whiten with the covariance first, then test with sigma = 1.
    #[arg(long, requires = "cov")]
    pub whiten: bool,
    /// Seed for the initial centroids.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of Lloyd updates.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum SimulationKind {
    Type1,
    Power,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub kind: SimulationKind,
    /// TOML file with experiment settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for pvalues.csv, report.json and qq.csv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// global_null, spike or ortho_theta.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// One or more effect sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// One or more p-value methods, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<String>>,
    /// random_pair or all_pairs.
    #[arg(long)]
    pub pair_policy: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Med,
    MedUncentered,
    Sample,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// CSV file, one observation per row.
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "med")]
    pub method: MethodArg,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("KMSEL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "KMSEL_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Test(args) => cmd_test::run(&args),
        Command::Simulate(args) => cmd_simulate::run(&args),
        Command::EstimateSigma(args) => cmd_estimate::run(&args),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kmsel: {e}");
            e.exit_code()
        }
    }
}
