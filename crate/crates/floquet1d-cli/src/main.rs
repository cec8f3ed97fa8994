//! Scan-oriented command line front end for the `floquet1d` solver.
//!
//! Every quantity crosses this boundary in the dimensionless form used for
//! plotting: couplings as `g/√ω`, momenta as `p/√ω`, packet widths as
//! `Δ/ω`, and times as `ωt`, with `--omega` carrying the explicit scale.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 I/O error.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "floquet1d", version, about = "Scattering off a time-periodic delta potential")]
struct Cli {
    /// Worker threads for scan evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection probabilities on a grid of incoming momenta.
    Scan(ScanArgs),
    /// Zero-transmission predictors, determinant pole, and width.
    Resonance(ResonanceArgs),
    /// Bound-state overlap trace |F(t)|² for a Gaussian packet.
    Overlap(OverlapArgs),
    /// Truncation convergence study at one momentum.
    Converge(ConvergeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args)]
struct ScanArgs {
    /// Static coupling g0/√ω.
    #[arg(long, allow_hyphen_values = true)]
    g0: f64,
    /// Drive coupling g1/√ω.
    #[arg(long)]
    g1: f64,
    /// Drive angular frequency (the unit scale).
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Smallest momentum p/√ω (exclusive of 0).
    #[arg(long = "p-min")]
    p_min: f64,
    /// Largest momentum p/√ω.
    #[arg(long = "p-max")]
    p_max: f64,
    /// Number of grid points (inclusive endpoints).
    #[arg(long)]
    steps: usize,
    /// Fixed truncation order; omit to auto-converge.
    #[arg(long = "nmax")]
    n_max: Option<usize>,
    /// Auto-convergence tolerance on |B0|².
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResonanceArgs {
    /// Static coupling g0/√ω.
    #[arg(long, allow_hyphen_values = true)]
    g0: f64,
    /// Drive coupling g1/√ω.
    #[arg(long)]
    g1: f64,
    /// Drive angular frequency (the unit scale).
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Truncation order for the pole search.
    #[arg(long = "nmax", default_value_t = 32)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OverlapArgs {
    /// Static coupling g0/√ω (must bind a state, so negative).
    #[arg(long, allow_hyphen_values = true)]
    g0: f64,
    /// Drive coupling g1/√ω.
    #[arg(long)]
    g1: f64,
    /// Drive angular frequency (the unit scale).
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Packet central momentum p0/√ω.
    #[arg(long)]
    p0: f64,
    /// Packet width Δ/ω.
    #[arg(long)]
    delta: f64,
    /// Final sample time ωt.
    #[arg(long = "t-max", default_value_t = 600.0)]
    t_max: f64,
    /// Number of uniform time samples.
    #[arg(long = "t-steps", default_value_t = 400)]
    t_steps: usize,
    /// Append an exponential decay fit behind the trace peak.
    #[arg(long)]
    fit: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Static coupling g0/√ω.
    #[arg(long, allow_hyphen_values = true)]
    g0: f64,
    /// Drive coupling g1/√ω.
    #[arg(long)]
    g1: f64,
    /// Drive angular frequency (the unit scale).
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Incident momentum p/√ω.
    #[arg(long)]
    p0: f64,
    /// Starting truncation order for the doubling ladder.
    #[arg(long = "nmax", default_value_t = 2)]
    n_max: usize,
    /// Convergence tolerance on |B0|².
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Command failure with its process exit code.
#[derive(Debug)]
enum CliError {
    Validation(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(err) => write!(f, "i/o failure: {err}"),
        }
    }
}

impl From<floquet1d::Error> for CliError {
    fn from(err: floquet1d::Error) -> Self {
        if err.is_validation() {
            CliError::Validation(err.to_string())
        } else {
            CliError::Numerical(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

fn main() {
    // Usage problems are validation errors (exit 1), not clap's default 2,
    // which this tool reserves for numerical failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: invalid configuration: --jobs must be at least 1");
            std::process::exit(1);
        }
        // Ignore failure: the global pool can only be set once (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let result = match cli.command {
        Command::Scan(args) => commands::run_scan(&args),
        Command::Resonance(args) => commands::run_resonance(&args),
        Command::Overlap(args) => commands::run_overlap(&args),
        Command::Converge(args) => commands::run_converge(&args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
