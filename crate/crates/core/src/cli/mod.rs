//! Command-line front end: parses instance and update files, dispatches to a
//! solver and emits a JSON report.
//!
//! Exit codes: `0` clean run, `2` certificate violation under `--verify`,
//! `3` parse or input error, `1` anything else.

mod commands;
pub mod gen;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub use report::{digest, Report, VerifyResult, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mwu-lp", version, about = "Multiplicative-weight LP solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Accuracy parameter; defaults to 0.1, or 1/200 for `positive`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Check the certificate, and compare against the exact oracle on small instances.
    #[arg(long)]
    pub verify: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Fast,
    Basic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamArg {
    FullDual,
    PrimalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Setting {
    Static,
    Dynamic,
    Stream,
    Online,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheduling {
    Sequential,
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Covering,
    Packing,
    Positive,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamKind {
    Restricting,
    Relaxing,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Covering template `C x >= 1` on a `covering` file.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMode::Fast)]
        mode: SolveMode,
        #[command(flatten)]
        common: Common,
    },
    /// Packing template `P x <= 1` on a `packing` file.
    Packing {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Positive LP `P x <= 1, C x >= 1`, optionally replaying relaxing updates
    /// (`set a i v` and `set b j v` move the packing and covering right-hand sides).
    Positive {
        instance: PathBuf,
        #[arg(long)]
        updates: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Covering template under restricting `set C` updates.
    Dynamic {
        instance: PathBuf,
        #[arg(long)]
        updates: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Multi-pass streaming over the rows of a `covering` file.
    Stream {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = StreamArg::FullDual)]
        mode: StreamArg,
        #[command(flatten)]
        common: Common,
    },
    /// Online covering: rows of a `covering` file arrive one at a time.
    Online {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// General covering LP `min a^T x, C x >= b` on a `general` file.
    General {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Setting::Static)]
        setting: Setting,
        /// Restricting updates for `--setting dynamic`.
        #[arg(long)]
        updates: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StreamArg::FullDual)]
        mode: StreamArg,
        #[arg(long, value_enum, default_value_t = Scheduling::Interleaved)]
        scheduling: Scheduling,
        #[command(flatten)]
        common: Common,
    },
    /// Random instance and optional monotone update stream.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Covering rows (`m`, or `m_c` for positive instances).
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    #[arg(long, default_value_t = 10)]
    pub cols: usize,
    /// Packing rows of positive instances.
    #[arg(long, default_value_t = 5)]
    pub packing_rows: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.0)]
    pub hi: f64,
    #[arg(long, value_enum)]
    pub stream: Option<StreamKind>,
    #[arg(long, default_value_t = 100)]
    pub events: usize,
    /// Instance output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Update stream output path.
    #[arg(long)]
    pub updates: Option<PathBuf>,
}

/// Failure of a command before a report could be produced.
#[derive(Debug)]
pub enum CliError {
    Input(Error),
    Solver(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Solver(Error::CertificateViolation(_)) => EXIT_VIOLATION,
            CliError::Solver(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) | CliError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::NonMonotoneUpdate { .. }
            | Error::IndexOutOfRange { .. }
            | Error::NegativeEntry { .. }
            | Error::EntryAboveLambda { .. }
            | Error::EpsOutOfRange { .. }
            | Error::EmptyMatrix
            | Error::ZeroScaleFactor { .. }
            | Error::StreamExhaustedMidRow { .. }
            | Error::RowAfterTermination
            | Error::InvalidValue { .. } => CliError::Input(e),
            _ => CliError::Solver(e),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match commands::execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
