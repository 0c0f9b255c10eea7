//! Batch experiment runner: no-signaling verification, scenario
//! equivalence, channel experiments, randomness analysis of bit files, and
//! brute-force oracle self-checks.
//!
//! Exit codes: 0 on success, 1 when a verification subcommand detects an
//! invariant violation, 2 on usage or configuration errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, unreadable input: exit 2.
    Usage(String),
    /// A verification subcommand found a violated invariant: exit 1.
    Verification(String),
}

impl From<nosignal::Error> for CliError {
    fn from(e: nosignal::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "nosignal",
    version,
    about = "Quantum measurement experiments: verify that entanglement carries no signal"
)]
struct Cli {
    /// JSON config file supplying any flag; explicit flags win on conflict.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep seeded random Bob measurements on a Bell pair and verify that
    /// Alice's marginal stays at 1/2.
    VerifyNosignaling(VerifyArgs),
    /// Verify that one Bob measurement, two composed Bob measurements, and
    /// no Bob measurement all leave Alice's statistics identical.
    Scenarios(ScenariosArgs),
    /// The compressibility-channel experiment.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Randomness statistics of bit streams.
    #[command(subcommand)]
    Randomness(RandomnessCmd),
    /// Born-rule sampling of measurement outcomes.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Brute-force oracle self-checks.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random Bob families to sweep (half spin-axis, half Kraus).
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; required (here or in the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Largest tolerated |P(0) - 1/2|.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScenariosArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest tolerated deviation from 1/2 in any scenario.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Run a channel experiment and report its measured capacity.
    Run(ChannelRunArgs),
}

#[derive(Args)]
struct ChannelRunArgs {
    /// Bits per block (Bell pairs per trial).
    #[arg(long)]
    block_len: Option<usize>,
    /// Number of blocks; intended bits alternate 0, 1.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed for all measurement outcomes.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of Bob's scramble template (defaults to a stream derived from
    /// the master seed).
    #[arg(long)]
    template_seed: Option<u64>,
    /// Bob's behavior: honest-protocol, always-nothing, or always-scramble.
    #[arg(long)]
    policy: Option<String>,
    /// Fixed compression-ratio cutoff; when absent it is calibrated from
    /// uniform strings.
    #[arg(long)]
    threshold: Option<f64>,
    /// Samples for threshold calibration.
    #[arg(long)]
    calib_samples: Option<usize>,
    /// Quantile for threshold calibration.
    #[arg(long)]
    calib_quantile: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-trial records here as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RandomnessCmd {
    /// Compression ratio, block entropy and Borel normality of a bit file.
    Analyze(RandomnessArgs),
}

#[derive(Args)]
struct RandomnessArgs {
    /// Input file: ASCII '0'/'1' text (whitespace ignored), or raw bytes
    /// with --raw.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Treat the input as raw bytes, most significant bit first.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest block size for the Borel normality check.
    #[arg(long)]
    max_k: Option<usize>,
    /// Block size for the entropy estimate.
    #[arg(long)]
    entropy_k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Draw seeded outcomes of a measurement on a qubit state.
    Sample(MeasureArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// State to measure: maximally-mixed, zero, one, or bernoulli (with --p).
    #[arg(long)]
    state: Option<String>,
    /// Probability of outcome 0 for the bernoulli state.
    #[arg(long)]
    p: Option<f64>,
    /// Family to measure: computational, or spin (with --axis).
    #[arg(long)]
    family: Option<String>,
    /// Spin measurement axis as "x,y,z".
    #[arg(long)]
    axis: Option<String>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Compare the per-symbol string law against the full tensor-space law
    /// for every string of length n.
    Enum(OracleArgs),
}

#[derive(Args)]
struct OracleArgs {
    /// String length (1 to 7).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() {
    // NOSIGNAL_THREADS caps parallelism; 0 or unset means automatic.
    if let Ok(raw) = std::env::var("NOSIGNAL_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let file = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let outcome = match cli.command {
        Command::VerifyNosignaling(args) => commands::verify_nosignaling(&args, &file),
        Command::Scenarios(args) => commands::scenarios(&args, &file),
        Command::Channel(ChannelCmd::Run(args)) => commands::channel_run(&args, &file),
        Command::Randomness(RandomnessCmd::Analyze(args)) => {
            commands::randomness_analyze(&args, &file)
        }
        Command::Measure(MeasureCmd::Sample(args)) => commands::measure_sample(&args, &file),
        Command::Oracle(OracleCmd::Enum(args)) => commands::oracle_enum(&args, &file),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    match e {
        CliError::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        CliError::Verification(msg) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
