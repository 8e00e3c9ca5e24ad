mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    /// The report was written but some check missed its tolerance.
    SuiteFailure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::SuiteFailure(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Budget(_) => "budget",
            CliError::SuiteFailure(_) => "suite_failure",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Budget(m) | CliError::SuiteFailure(m) => m,
        }
    }
}

impl From<lmoment_core::Error> for CliError {
    fn from(e: lmoment_core::Error) -> Self {
        match e {
            lmoment_core::Error::Budget { .. } => {
                CliError::Budget(format!("{e}; raise --budget or pass --override-budget"))
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = json!({
                "error": { "kind": e.kind(), "message": e.message(), "exit_code": e.code() }
            });
            eprintln!("{record}");
            ExitCode::from(e.code())
        }
    }
}
