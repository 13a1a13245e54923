//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "partls",
    version,
    about = "Partitioned least squares: grouped linear regression solvers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit a model and emit the result as JSON
    Fit(FitArgs),
    /// Run multi-start benchmark traces and emit them as CSV
    Bench(BenchArgs),
    /// Generate datasets and partition files
    #[command(subcommand)]
    Gen(GenCommand),
    /// Download a dataset into the local cache with checksum pinning
    Fetch(FetchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    /// Alternating least squares with random restarts
    Alt,
    /// Exact enumeration of all group sign vectors
    Opt,
    /// Branch and bound on group signs
    Bnb,
}

#[derive(Args)]
pub struct FitArgs {
    /// CSV dataset with a header row
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the target column
    #[arg(long)]
    pub target: String,
    /// Partition JSON: {"groups": {"name": ["feature", ...]}}
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverChoice::Opt)]
    pub solver: SolverChoice,
    /// Regularization strength on the group weights
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Iterations per restart (alternating solver)
    #[arg(long, default_value_t = 20)]
    pub iterations: usize,
    /// Random restarts (alternating solver)
    #[arg(long, default_value_t = 100)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Append an all-ones intercept column in its own group
    #[arg(long)]
    pub intercept: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Node cap for the branch-and-bound solver
    #[arg(long, default_value_t = 1 << 20)]
    pub node_limit: usize,
    /// Largest group count the exact solver will enumerate
    #[arg(long, default_value_t = 25)]
    pub enumeration_cap: usize,
    /// Worker threads (1 = fully sequential)
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the result JSON here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Solvers to trace
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SolverChoice::Alt, SolverChoice::Opt])]
    pub solvers: Vec<SolverChoice>,
    /// Iteration settings for the alternating solver (one trace per value)
    #[arg(long, value_delimiter = ',', default_values_t = [20usize])]
    pub alt_iterations: Vec<usize>,
    /// Write the trace CSV here instead of stdout
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// Subset-sum reduction instance
    SubsetSum {
        /// The positive integers of the instance
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Output CSV path
        #[arg(long)]
        data: PathBuf,
        /// Output partition JSON path
        #[arg(long)]
        partition: PathBuf,
    },
    /// Random instance with a planted feasible model
    Random {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        groups: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gaussian noise level added to the planted targets
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Consecutive feature blocks for an existing CSV
    Blocks {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 10)]
        block_size: usize,
        #[arg(long)]
        partition: PathBuf,
    },
}

#[derive(Args)]
pub struct FetchArgs {
    /// Known dataset name (superconductivity, yearpredictionmsd)
    #[arg(long, conflicts_with = "url")]
    pub name: Option<String>,
    /// Arbitrary URL to download instead of a known dataset
    #[arg(long)]
    pub url: Option<String>,
    /// Expected SHA-256 of the download (pinned on first use otherwise)
    #[arg(long)]
    pub sha256: Option<String>,
    #[arg(long, default_value = ".partls-cache")]
    pub cache_dir: PathBuf,
    /// Output path for the prepared CSV (or the raw download with --url)
    #[arg(long)]
    pub out: PathBuf,
}
