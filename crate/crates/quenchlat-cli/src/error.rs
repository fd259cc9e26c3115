//! CLI error type with the exit-code split the tool guarantees:
//! configuration problems exit 1, runtime failures exit 2.

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The config file, CLI arguments or environment describe an experiment
    /// the tool cannot run (exit status 1).
    #[error("config: {0}")]
    Config(String),

    /// The experiment was well-formed but executing or writing it failed
    /// (exit status 2).
    #[error("runtime: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn runtime_err(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}
