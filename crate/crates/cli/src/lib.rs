//! Command-line front end for `polymoments`: moment tables, sampled curves
//! and the verification suite, as CSV or JSON.

pub mod args;
pub mod commands;
pub mod output;

use args::{Cli, Command};
use commands::Outcome;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] polymoments::Error),
    #[error("{0}")]
    Usage(String),
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Moments(args) => commands::moments(args),
        Command::Table(args) => commands::table(args),
        Command::Curve(args) => commands::curve(args),
        Command::Verify(args) => commands::verify(args),
    }
}

/// Caps the global thread pool at `POLYMOMENTS_THREADS` when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("POLYMOMENTS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "POLYMOMENTS_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}
