//! `locc`: build state families, decide one-way LOCC distinguishability,
//! decompose operator algebras and simulate fixed local measurements.
//!
//! Exit codes: 0 success or Distinguishable, 1 certificate rejected by
//! `verify`, 2 bad input, 3 Indistinguishable, 4 Inconclusive, 5 numerical
//! failure in `decompose`.

mod args;
mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numerical(e: locc_core::Error) -> Self {
        Self {
            code: 5,
            message: format!("numerical failure: {e}"),
        }
    }
}

impl From<locc_core::Error> for Failure {
    fn from(e: locc_core::Error) -> Self {
        Self::input(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(String, ExitCode), Failure> {
    match cli.command {
        Command::Construct { family, params, common } => {
            commands::construct(&input::build_family(family, &params)?, &common)
        }
        Command::Analyze { input, common } => commands::analyze(&input::resolve(&input)?, &common),
        Command::Decompose { input, common } => commands::decompose_cmd(&input::resolve(&input)?, &common),
        Command::Simulate {
            input,
            measure,
            drop,
            shots,
            common,
        } => commands::simulate(&input::resolve(&input)?, &measure, drop.as_deref(), shots, &common),
        Command::Verify { input, common } => commands::verify(&input, &common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
