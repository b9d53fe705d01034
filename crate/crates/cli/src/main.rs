//! `wgbh`: solve, convergence studies, self-validation and mesh tools.
//!
//! Exit status: 0 success, 1 usage error, 2 numerical or runtime failure.

mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use wg_biharmonic::Error;

use args::{Cli, Command, MeshCommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::MeshFormat { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Validate(a) => commands::validate(a),
        Command::Mesh(MeshCommand::Export(a)) => commands::mesh_export(a),
        Command::Mesh(MeshCommand::Inspect(a)) => commands::mesh_inspect(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
