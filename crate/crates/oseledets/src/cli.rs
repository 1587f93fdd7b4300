//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use oseledets_core::MethodTag;

#[derive(Debug, Parser)]
#[command(
    name = "oseledets",
    version,
    about = "Approximate Oseledets subspaces of matrix cocycles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the exact-solution test cocycle and its ground truth.
    GenExact(GenExactArgs),
    /// Approximate w_j at one base time.
    Compute(ComputeArgs),
    /// Error against ground truth over a grid of methods and half-widths.
    Sweep(SweepArgs),
    /// Equivariance and expansion-rate series for one method.
    Validate(ValidateArgs),
    /// Lyapunov exponents by QR averaging.
    Lyap(LyapArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SeedArg {
    /// Seed for every random draw; falls back to OSLC_SEED, then 1.
    #[arg(long, env = "OSLC_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ShiftArgs {
    /// Lower dichotomy shift; estimated from the data when omitted.
    #[arg(long, requires = "lambda_right", allow_hyphen_values = true)]
    pub lambda_left: Option<f64>,
    /// Upper dichotomy shift; estimated from the data when omitted.
    #[arg(long, requires = "lambda_left", allow_hyphen_values = true)]
    pub lambda_right: Option<f64>,
    /// Fraction of the neighbouring exponent gaps used for estimated shifts.
    #[arg(long, default_value_t = 0.1)]
    pub shift_fraction: f64,
}

/// Overrides of the per-method defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct MethodParams {
    /// Product length (svd, svd2) or warm-up start offset (ginelli, ginelli2).
    #[arg(long)]
    pub m: Option<usize>,
    /// Singular-vector warm-up length (ginelli2).
    #[arg(long)]
    pub m_prime: Option<usize>,
    /// Past offset of the s-frame (wolfe).
    #[arg(long)]
    pub m1: Option<usize>,
    /// Singular-vector warm-up length of the s-frame (wolfe).
    #[arg(long)]
    pub m1_prime: Option<usize>,
    /// Forward product length for the u-frame (wolfe).
    #[arg(long)]
    pub m2: Option<usize>,
    /// Checkpoint spacing (svd2).
    #[arg(long)]
    pub stride: Option<usize>,
    /// Initial backward coefficients, comma separated (ginelli, ginelli2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c_init: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GenExactArgs {
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Comma-separated exponents, or `log-ladder:k` for ln k, ln(k−1), …;
    /// defaults to `log-ladder:<dim>`.
    #[arg(long, allow_hyphen_values = true)]
    pub spectrum: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// The window covers times −N … N−1.
    #[arg(long, default_value_t = 350)]
    pub half_width: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Draw a fresh perturbation for every time (default).
    #[arg(long, conflicts_with = "fixed_z")]
    pub fresh_z: bool,
    /// Use one perturbation matrix for all times.
    #[arg(long)]
    pub fixed_z: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the normalized exact vectors as CSV.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub method: MethodTag,
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    /// Half-width N.
    #[arg(long)]
    pub n: usize,
    /// Base time.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub at: i64,
    #[command(flatten)]
    pub params: MethodParams,
    #[command(flatten)]
    pub shifts: ShiftArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Truth CSV; adds an exact_error column.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Add the elapsed wall time in milliseconds.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Comma-separated methods; all seven by default.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<MethodTag>>,
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    #[arg(long, default_value_t = 10)]
    pub n_min: usize,
    #[arg(long, default_value_t = 350)]
    pub n_max: usize,
    #[arg(long, default_value_t = 5)]
    pub n_step: usize,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub at: i64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub shifts: ShiftArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// A method, or `truth` to check the vectors of --truth.
    #[arg(long)]
    pub method: MethodTag,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    /// Half-width N (not used with `truth`).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub at: i64,
    /// Largest shift m of the equivariance series.
    #[arg(long)]
    pub equivariance: Option<usize>,
    /// Largest horizon m of the expansion-rate series.
    #[arg(long)]
    pub expansion: Option<usize>,
    #[command(flatten)]
    pub params: MethodParams,
    #[command(flatten)]
    pub shifts: ShiftArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LyapArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Seed of the initial frame.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
