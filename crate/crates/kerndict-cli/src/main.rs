//! Command-line front end: measures kernel dictionaries from CSV data,
//! checks the certificates and entropy floors, runs streaming
//! sparsification, and hosts the randomized verification harness.
//!
//! Exit codes: 0 on success with every asserted bound met, 1 when a
//! measured quantity violates an asserted bound, 2 on usage or input
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;
mod verify;

#[derive(Parser)]
#[command(
    name = "kerndict",
    version,
    about = "Diversity measures, bound certificates, and entropy floors for kernel dictionaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure a dictionary and certify the cross-measure bounds
    Analyze(AnalyzeArgs),
    /// Estimate entropies and check the floors the measures imply
    Entropy(EntropyArgs),
    /// Stream points through an admission criterion
    Sparsify(SparsifyArgs),
    /// Check bounds and floors over seeded random dictionaries
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    /// Parzen estimates over the raw points
    Input,
    /// Leave-one-out Parzen estimates over the feature images
    Feature,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    /// Closed-form quadratic entropy of the gaussian-window estimate;
    /// needs a gaussian kernel
    Gaussian,
    /// Gram-sum quadratic entropy under the dictionary's own kernel
    General,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// CSV of points, one per row; a non-numeric first line is treated as
    /// a header
    #[arg(long)]
    input: PathBuf,
    /// Kernel configuration, e.g. gaussian:sigma=1 or polynomial:p=2,c=1
    #[arg(long)]
    kernel: String,
    /// Treat the input as a pre-built square Gram matrix instead of points
    #[arg(long)]
    gram: bool,
    /// Also write the dictionary's Gram matrix to this CSV path
    #[arg(long, value_name = "FILE", conflicts_with = "gram")]
    export_gram: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct EntropyArgs {
    /// CSV of points, one per row; a non-numeric first line is treated as
    /// a header
    #[arg(long)]
    input: PathBuf,
    /// Kernel configuration, e.g. gaussian:sigma=1
    #[arg(long)]
    kernel: String,
    /// Renyi order; omits the quadratic default
    #[arg(long, conflicts_with = "q")]
    alpha: Option<f64>,
    /// Tsallis entropic index; omits the quadratic default
    #[arg(long)]
    q: Option<f64>,
    /// Which space the estimate lives in
    #[arg(long, value_enum, default_value_t = Space::Input)]
    space: Space,
    /// Force the quadratic-entropy form instead of choosing by kernel
    #[arg(long, value_enum)]
    identity: Option<Identity>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SparsifyArgs {
    /// CSV of points, streamed in file order
    #[arg(long)]
    input: PathBuf,
    /// Kernel configuration, e.g. gaussian:sigma=1
    #[arg(long)]
    kernel: String,
    /// Admission criterion: novelty-distance, approximation-ald,
    /// coherence, or babel
    #[arg(long)]
    criterion: String,
    /// Admission threshold; minimum score for the distance-like criteria,
    /// maximum for coherence and babel
    #[arg(long)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the trace here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// CSV of points; every trial checks this fixed dictionary instead
    /// of a random one
    #[arg(long)]
    input: Option<PathBuf>,
    /// Fixed kernel for every trial; defaults to gaussian with a
    /// per-trial bandwidth drawn from [0.3, 3)
    #[arg(long)]
    kernel: Option<String>,
    /// Number of random dictionaries to generate
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Base seed; trial t uses seed + t
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the summary here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Requested leave-one-out solve jitter: `KERNDICT_JITTER` when set,
/// otherwise zero. The fallback ladder still engages on factorization
/// failures either way.
pub fn requested_jitter() -> Result<f64> {
    match std::env::var("KERNDICT_JITTER") {
        Ok(raw) => {
            let value: f64 = raw
                .trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("KERNDICT_JITTER='{raw}' is not a number"))?;
            if !(value.is_finite() && value >= 0.0) {
                bail!("KERNDICT_JITTER must be a nonnegative finite real, got {value}");
            }
            Ok(value)
        }
        Err(std::env::VarError::NotPresent) => Ok(0.0),
        Err(e) => bail!("cannot read KERNDICT_JITTER: {e}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => commands::cmd_analyze(&args),
        Command::Entropy(args) => commands::cmd_entropy(&args),
        Command::Sparsify(args) => commands::cmd_sparsify(&args),
        Command::Verify(args) => verify::cmd_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
