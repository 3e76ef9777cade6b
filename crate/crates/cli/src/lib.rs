//! Batch front end: parse a run configuration, dispatch derivations,
//! validations and scans, and emit machine-readable outputs.
//!
//! Every command reads an optional TOML configuration plus overriding
//! flags, writes its artifacts under an output directory, and reports
//! a human summary on stdout.  Outputs are byte-identical across runs
//! with the same inputs.

mod commands;
mod config;
mod output;

pub use config::RunConfig;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Process-level failure modes; the numeric code is the exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// A requested check ran and failed (exit 1).
    #[error("{0}")]
    Check(String),
    /// Malformed configuration or arguments (exit 2).
    #[error("{0}")]
    Config(String),
    /// A precondition on the requested computation is violated (exit 3).
    #[error("{0}")]
    Precondition(String),
    /// Output could not be written (exit 4).
    #[error("{0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Check(_) => 1,
            RunError::Config(_) => 2,
            RunError::Precondition(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

impl From<sceff_core::engine::EngineError> for RunError {
    fn from(e: sceff_core::engine::EngineError) -> RunError {
        RunError::Precondition(e.to_string())
    }
}

impl From<sceff_core::scalar::ScalarError> for RunError {
    fn from(e: sceff_core::scalar::ScalarError) -> RunError {
        RunError::Precondition(e.to_string())
    }
}

impl From<sceff_core::phase::PhaseError> for RunError {
    fn from(e: sceff_core::phase::PhaseError) -> RunError {
        RunError::Precondition(e.to_string())
    }
}

impl From<sceff_core::validate::ValidateError> for RunError {
    fn from(e: sceff_core::validate::ValidateError) -> RunError {
        RunError::Precondition(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sceff",
    version,
    about = "Effective Hamiltonians of tight-binding models: exact tables, \
             diagonalization cross-checks, phase diagrams and stability \
             diagnostics"
)]
struct Cli {
    /// Run the data-parallel parts on a single thread.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive effective interaction tables and compare them to the
    /// closed-form references.
    Derive(commands::derive::DeriveArgs),
    /// Compare effective ground energies against exact diagonalization
    /// over a hopping sweep.
    ValidateEd(commands::validate_ed::ValidateArgs),
    /// Enumerate periodic ground states of the diagonal interaction
    /// table and cut the phase diagram in the field.
    ScanPhase(commands::scan_phase::ScanArgs),
    /// Stability and convergence diagnostics at one parameter point.
    Diagnostics(commands::diagnostics::DiagArgs),
    /// Check the projector and ladder identities on small clusters.
    Identities(commands::identities::IdentArgs),
}

/// Entry point shared by the binary and the test suite.  `argv` starts
/// with the program name, as in `std::env::args`.
pub fn run<I, T>(argv: I) -> Result<(), RunError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(RunError::Config(e.to_string())),
    };
    sceff_core::par::force_serial(cli.serial);
    match cli.command {
        Command::Derive(a) => commands::derive::run(&a),
        Command::ValidateEd(a) => commands::validate_ed::run(&a),
        Command::ScanPhase(a) => commands::scan_phase::run(&a),
        Command::Diagnostics(a) => commands::diagnostics::run(&a),
        Command::Identities(a) => commands::identities::run(&a),
    }
}
