//! `glil` — command-line driver for G-expectation solvers, controlled
//! diffusions, capacity estimation, Strassen geometry and LIL experiments.
//!
//! Exit codes: 0 success, 1 domain/config error, 2 internal error.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod config;
mod error;
mod output;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // bad flags or an unknown subcommand: usage text, exit 1
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
