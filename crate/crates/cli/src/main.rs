//! `hilbert`: command-line front end for hilbert-core.

mod cli;
mod commands;
mod io;
mod svg;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hilbert_core::ErrorClass;

use crate::io::CliError;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let args = match cli::Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&args.command, args.tolerance) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                CliError::Geometry(g) if g.class() == ErrorClass::Numeric => EXIT_NUMERIC,
                _ => EXIT_VALIDATION,
            };
            ExitCode::from(code)
        }
    }
}
