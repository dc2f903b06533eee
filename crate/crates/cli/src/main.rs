mod args;
mod commands;

use std::process::ExitCode;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::Parser;
use serde::Serialize;

pub use args::Cli;

/// One-line JSON error written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorLine {
    pub error: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    pub message: String,
}

impl ErrorLine {
    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            error: "runtime-failure",
            parameter: None,
            message: message.into(),
        }
    }

    pub fn validation(parameter: &str, message: impl Into<String>) -> Self {
        Self {
            error: "validation-failure",
            parameter: Some(parameter.to_string()),
            message: message.into(),
        }
    }
}

/// Maps a clap error to the machine-readable form; `None` for help/version output.
pub(crate) fn from_clap(err: &clap::Error) -> Option<ErrorLine> {
    let arg = match err.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => Some(s.clone()),
        _ => None,
    };
    // "--dt <DT>" -> "dt"
    let parameter = arg.map(|a| {
        a.split_whitespace()
            .next()
            .unwrap_or("")
            .trim_start_matches('-')
            .replace('-', "_")
    });
    let message = err.kind().as_str().map(str::to_string).unwrap_or_else(|| err.to_string());
    let detail = err
        .to_string()
        .lines()
        .next()
        .unwrap_or("")
        .trim_start_matches("error: ")
        .to_string();
    let kind = match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            return None
        }
        ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => "unknown-flag",
        ErrorKind::InvalidValue | ErrorKind::ValueValidation => "validation-failure",
        _ => "usage",
    };
    Some(ErrorLine {
        error: kind,
        parameter,
        message: if detail.is_empty() { message } else { detail },
    })
}

fn emit(line: &ErrorLine) {
    eprintln!("{}", serde_json::to_string(line).expect("error line serializes"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match from_clap(&e) {
                None => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                Some(line) => {
                    emit(&line);
                    ExitCode::from(2)
                }
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(line) => {
            emit(&line);
            ExitCode::from(if line.error == "runtime-failure" { 1 } else { 2 })
        }
    }
}
