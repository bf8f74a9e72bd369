use std::path::PathBuf;

use hegy_core::HegyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: missing value `{token}`")]
    MissingValue { line: u64, token: String },

    #[error("input contains no observations")]
    EmptyInput,

    #[error(transparent)]
    Engine(#[from] HegyError),
}

impl CliError {
    pub fn is_data_error(&self) -> bool {
        match self {
            CliError::Config(_) | CliError::Output(_) => false,
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::MissingValue { .. }
            | CliError::EmptyInput => true,
            CliError::Engine(e) => e.is_data_error(),
        }
    }

    /// Process exit code: 2 for configuration errors, 3 for data errors.
    pub fn exit_code(&self) -> i32 {
        if self.is_data_error() {
            3
        } else {
            2
        }
    }

    /// Stable prefix written before the message on standard error.
    pub fn prefix(&self) -> &'static str {
        if self.is_data_error() {
            "error[data]"
        } else {
            "error[config]"
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
