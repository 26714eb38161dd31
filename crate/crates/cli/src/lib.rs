//! Reproducible command-line experiments over `divring-core`.
//!
//! Every run prints a report that embeds its full configuration, so feeding
//! the `config:` block back through `--config` reproduces it byte for byte.
//!
//! Exit codes: 0 when every check passed, 1 when violations were found,
//! 2 on usage errors, 3 when a budget or ceiling stopped the run early.

pub mod args;
pub mod commands;
pub mod config;
pub mod golden;
pub mod report;
pub mod sample;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Format};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    /// A stream broke one of its own invariants.
    Internal(String),
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn error(code: i32, msg: impl Into<String>) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: msg.into(),
            code,
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv = match config::expand(argv.into_iter().map(Into::into).collect()) {
        Ok(v) => v,
        Err(e) => return Outcome::error(2, format!("error: {e}\n")),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    stdout: e.render().to_string(),
                    stderr: String::new(),
                    code: 0,
                },
                _ => Outcome::error(2, e.render().to_string()),
            }
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    match commands::dispatch(&cli.command, config::describe(cli)) {
        Ok(report) => Outcome {
            stdout: match cli.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            },
            stderr: String::new(),
            code: report.status.exit_code(),
        },
        Err(CliError::Usage(m)) => Outcome::error(2, format!("error: {m}\n")),
        Err(CliError::Internal(m)) => Outcome::error(1, format!("internal error: {m}\n")),
    }
}
