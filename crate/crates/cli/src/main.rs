//! `fcc` — flying capacitor converter analysis from the command line.
//!
//! Four subcommands: `analyze` (stability + steady state + averages as JSON),
//! `simulate` (trajectory CSV from the closed form or the RK45 oracle),
//! `sweep` (average current vs switching period) and `profiles` (normalized
//! two-period orbit profiles). Exit codes: 0 success, 2 input validation,
//! 3 I/O failure, 4 internal inconsistency.

mod commands;
mod manifest;
mod output;
mod params;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fcc",
    version,
    about = "Three-level flying capacitor converter analysis",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stability report, periodic steady state, closed-form averages and
    /// energy residuals as a JSON document on stdout.
    Analyze(AnalyzeArgs),
    /// Trajectory CSV over a number of switching periods.
    Simulate(SimulateArgs),
    /// Average current versus switching period, CSV.
    Sweep(SweepArgs),
    /// Steady orbits over two normalized periods for several period values,
    /// wide CSV.
    Profiles(ProfilesArgs),
}

/// Circuit parameters; flags override values from `--params`.
#[derive(Args, Clone)]
struct ParamArgs {
    /// Load resistance in ohms.
    #[arg(long = "R", allow_negative_numbers = true, value_name = "OHMS")]
    r: Option<f64>,
    /// Load inductance in henries.
    #[arg(long = "L", allow_negative_numbers = true, value_name = "HENRIES")]
    l: Option<f64>,
    /// Flying capacitance in farads.
    #[arg(long = "C", allow_negative_numbers = true, value_name = "FARADS")]
    c: Option<f64>,
    /// Source voltage in volts.
    #[arg(long = "Vdc", allow_negative_numbers = true, value_name = "VOLTS")]
    vdc: Option<f64>,
    /// Switching period in seconds.
    #[arg(long = "T", allow_negative_numbers = true, value_name = "SECONDS")]
    t: Option<f64>,
    /// Key-value parameter file with keys R, L, C, Vdc, T.
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
    /// Omit timestamps so identical invocations produce identical bytes.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Also write the JSON document to this path.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// Exact periodic steady state tiled over the requested periods.
    #[value(name = "closed_form", alias = "closed-form")]
    ClosedForm,
    /// Adaptive RK45 from the initial state (default zero).
    Rk45,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of switching periods to cover.
    #[arg(long, default_value_t = 20)]
    periods: usize,
    /// Trajectory source.
    #[arg(long, value_enum, default_value_t = Source::Rk45)]
    source: Source,
    /// Initial inductor current in amperes (rk45 only).
    #[arg(long, value_name = "AMPERES")]
    i0: Option<f64>,
    /// Initial capacitor voltage in volts (rk45 only).
    #[arg(long, value_name = "VOLTS")]
    v0: Option<f64>,
    /// CSV output path.
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    Linear,
    Log,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// First period of the sweep, seconds.
    #[arg(long = "t-from", value_name = "SECONDS")]
    t_from: f64,
    /// Last period of the sweep, seconds.
    #[arg(long = "t-to", value_name = "SECONDS")]
    t_to: f64,
    /// Number of sweep points (>= 2).
    #[arg(long)]
    steps: usize,
    /// Spacing of the sweep points.
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    scale: Scale,
    /// CSV output path.
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
}

#[derive(Args)]
struct ProfilesArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated switching periods in seconds.
    #[arg(long = "t-list", value_name = "SECONDS,...", value_delimiter = ',')]
    t_list: Vec<f64>,
    /// CSV output path.
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
}

/// Application-level failure with its exit code.
pub enum AppError {
    /// Exit 2: bad input.
    Validation(String),
    /// Exit 3: filesystem failure.
    Io(String),
    /// Exit 4: numerical self-check failure.
    Internal(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Io(_) => 3,
            AppError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Validation(m) | AppError::Io(m) | AppError::Internal(m) => m,
        }
    }
}

impl From<fcc_core::Error> for AppError {
    fn from(e: fcc_core::Error) -> Self {
        use fcc_core::Error::*;
        match e {
            InvalidParams(_) | DomainError(_) => AppError::Validation(e.to_string()),
            SingularMatrix(_)
            | InternalInconsistency(_)
            | StepLimitExceeded { .. }
            | StepUnderflow { .. } => AppError::Internal(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Profiles(args) => commands::profiles(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
