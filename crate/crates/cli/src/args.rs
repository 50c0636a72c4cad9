use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hsicinf", version, about = "Post-selection inference for block HSIC feature screening")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select the top-k features of a CSV dataset and test them.
    Infer(InferArgs),
    /// Run a Monte-Carlo grid over synthetic scenarios.
    Simulate(SimulateArgs),
    /// Write a synthetic dataset as CSV.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default values for any flag.
    #[arg(long, env = "HSICINF_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "HSICINF_SEED")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "HSICINF_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, env = "HSICINF_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InferArgs {
    /// Input CSV with a header row.
    #[arg(env = "HSICINF_INPUT")]
    pub input: PathBuf,
    /// Response column; repeat or comma-separate for a vector response.
    #[arg(long, env = "HSICINF_RESPONSE", value_delimiter = ',')]
    pub response: Vec<String>,
    /// Columns to ignore.
    #[arg(long, env = "HSICINF_IDS", value_delimiter = ',')]
    pub ids: Vec<String>,
    /// Treat the response as labels 1..=CLASSES (delta output kernel).
    #[arg(long, env = "HSICINF_CLASSES")]
    pub classes: Option<usize>,
    #[arg(long, env = "HSICINF_K")]
    pub k: Option<usize>,
    #[arg(long, env = "HSICINF_BLOCK_SIZE")]
    pub block_size: Option<usize>,
    #[arg(long, env = "HSICINF_ALPHA")]
    pub alpha: Option<f64>,
    #[arg(long, env = "HSICINF_SHRINKAGE")]
    pub shrinkage: Option<f64>,
    /// hsicInf, hsicNaive (alias hsic) or split.
    #[arg(long, env = "HSICINF_METHOD")]
    pub method: Option<String>,
    /// Gaussian bandwidth for each standardized feature.
    #[arg(long, env = "HSICINF_BANDWIDTH")]
    pub bandwidth: Option<f64>,
    /// Gaussian bandwidth for the response (default 1 for a scalar
    /// response, median heuristic for a vector response).
    #[arg(long, env = "HSICINF_OUTPUT_BANDWIDTH")]
    pub output_bandwidth: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    /// Comma-separated scenarios: null, linear, additive, nonadditive,
    /// multivariate, threeclass.
    #[arg(long, env = "HSICINF_SCENARIO", value_delimiter = ',')]
    pub scenario: Vec<String>,
    #[arg(long, env = "HSICINF_METHODS", value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Sample sizes.
    #[arg(long, env = "HSICINF_N", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Block sizes.
    #[arg(long = "b-sweep", env = "HSICINF_B_SWEEP", value_delimiter = ',')]
    pub b_sweep: Vec<usize>,
    #[arg(long, env = "HSICINF_TRIALS")]
    pub trials: Option<usize>,
    #[arg(long, env = "HSICINF_K")]
    pub k: Option<usize>,
    #[arg(long, env = "HSICINF_ALPHA")]
    pub alpha: Option<f64>,
    #[arg(long, env = "HSICINF_SHRINKAGE")]
    pub shrinkage: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GenArgs {
    #[arg(long, env = "HSICINF_SCENARIO")]
    pub scenario: String,
    #[arg(long, env = "HSICINF_N")]
    pub n: usize,
    /// Output file (default: <out-dir>/<scenario>.csv).
    #[arg(long, env = "HSICINF_OUTPUT")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}
