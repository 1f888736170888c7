//! Command-line front end for `mm1ps`.
//!
//! Exit codes: 0 success, 1 tolerance failure, 2 usage error, 3 numeric failure.

use std::io::Write;

pub mod args;
pub mod commands;
pub mod compare;
pub mod output;
pub mod table1;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{method} failed: {source}")]
    Numeric {
        method: String,
        #[source]
        source: mm1ps::Error,
    },
    #[error("{0}")]
    Tolerance(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Domain errors are the caller's fault; everything else is numeric.
    pub fn numeric(method: &str, e: mm1ps::Error) -> Self {
        match e {
            mm1ps::Error::Domain(m) => CliError::Usage(format!("{method}: {m}")),
            source => CliError::Numeric {
                method: method.to_string(),
                source,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Density(a) => commands::density(a, out),
        Command::Table1(a) => commands::table(a, out),
        Command::Tail(a) => commands::tail(a, out),
        Command::Simulate(a) => commands::simulate(a, out),
        Command::Compare(a) => {
            let rows = compare::run(&compare::suite(a.suite));
            output::write_records(out, &rows, a.format)?;
            let failed: Vec<&str> = rows
                .iter()
                .filter(|r| !r.pass)
                .map(|r| r.check.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Tolerance(format!(
                    "{} check(s) out of tolerance: {}",
                    failed.len(),
                    failed.join("; ")
                )))
            }
        }
    }
}
