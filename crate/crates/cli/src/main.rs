use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use polymoments_cli::args::Cli;
use polymoments_cli::{configure_threads, run, EXIT_SUCCESS, EXIT_USAGE, EXIT_VERIFY_FAILED};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let text = if cli.json {
        outcome.record.to_json() + "\n"
    } else {
        outcome.record.to_csv()
    };
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::FAILURE;
    }
    if outcome.success {
        ExitCode::from(EXIT_SUCCESS as u8)
    } else {
        eprintln!("verification failed");
        ExitCode::from(EXIT_VERIFY_FAILED as u8)
    }
}
