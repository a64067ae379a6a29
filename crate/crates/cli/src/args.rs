//! Command-line definitions. Every option has a default shown in `--help`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "vqasvm", version, about = "Variational quantum approximate SVM simulator")]
pub struct Cli {
    /// Worker threads for parallel evaluation; results do not depend on it.
    #[arg(long, global = true, env = "VQASVM_THREADS")]
    pub threads: Option<usize>,
    /// key=value file whose keys mirror long flag names; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the Bloch-sphere toy dataset.
    GenerateToy(GenerateToyArgs),
    /// Scale and subsample a CSV file into train/test dataset files.
    PrepareCsv(PrepareCsvArgs),
    /// Train a model and write model JSON plus a trace CSV.
    Train(TrainArgs),
    /// Classify points with a trained model.
    Classify(ClassifyArgs),
    /// Solve the convex reference problems classically.
    ReferenceSolve(ReferenceArgs),
    /// Tabulate loss-circuit depth and CNOT count over M.
    ScalingBench(ScalingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BalanceArg {
    Balanced,
    Unbalanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FmapArg {
    Bloch,
    Zz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Direct,
    Circuit,
}

#[derive(Debug, Args)]
pub struct GenerateToyArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BalanceArg::Balanced)]
    pub balance: BalanceArg,
    #[arg(long, default_value_t = 30)]
    pub num_test: usize,
    /// Angular jitter bound around each class center, radians.
    #[arg(long, default_value_t = 0.15)]
    pub spread: f64,
}

#[derive(Debug, Args)]
pub struct PrepareCsvArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub label_column: String,
    /// Comma-separated label values mapped to +1; all others map to -1.
    #[arg(long, value_delimiter = ',', required = true)]
    pub positive: Vec<String>,
    /// Training-set size, a power of two.
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FmapArgs {
    #[arg(long, value_enum, default_value_t = FmapArg::Zz)]
    pub fmap: FmapArg,
    /// ZZ data qubits; defaults to the feature dimension.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// ZZ repetitions.
    #[arg(long, default_value_t = 2)]
    pub reps: usize,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    #[arg(long, default_value_t = 1e4)]
    pub lambda: f64,
    /// Regularization weight; `inf` selects the hard margin.
    #[arg(long = "C", default_value = "1e4")]
    pub c: String,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// Exact expectation values (the default unless --shots is given).
    #[arg(long, conflicts_with = "shots")]
    pub exact: bool,
    /// Finite-shot estimation with this many shots per circuit.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_enum, default_value_t = PathArg::Direct)]
    pub path: PathArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training dataset JSON with a power-of-two number of points.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub fmap: FmapArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long, default_value_t = 5)]
    pub layers: usize,
    #[arg(long, default_value_t = 1024)]
    pub max_iter: usize,
    /// Fixed SPSA step gain a; calibrated when absent.
    #[arg(long)]
    pub spsa_a: Option<f64>,
    /// Fixed SPSA perturbation gain c; sigma (or 0.1) when absent.
    #[arg(long)]
    pub spsa_c: Option<f64>,
    #[arg(long)]
    pub no_blocking: bool,
    #[arg(long)]
    pub no_early_stop: bool,
    #[arg(long, default_value_t = 25)]
    pub sigma_samples: usize,
    /// Shots for a cheap warm-start phase before the main estimator.
    #[arg(long)]
    pub warm_start_shots: Option<u64>,
    #[arg(long, default_value_t = 32)]
    pub handoff: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// JSON with `points` and optional `labels`.
    #[arg(long)]
    pub test: PathBuf,
    /// Predictions CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct ReferenceArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub fmap: FmapArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Extra lambda values; one sweep row each.
    #[arg(long, value_delimiter = ',')]
    pub lambda_sweep: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
    pub m_list: Vec<usize>,
    #[command(flatten)]
    pub fmap: FmapArgs,
    #[arg(long, default_value_t = 5)]
    pub layers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Depth/CNOT table CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV of wall-clock times per loss evaluation.
    #[arg(long)]
    pub timing_out: Option<PathBuf>,
    /// Loss evaluations timed per M.
    #[arg(long, default_value_t = 5)]
    pub timing_reps: usize,
}
