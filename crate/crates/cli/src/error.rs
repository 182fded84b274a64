use std::fmt;

use chanent::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A verification ran to completion and at least one check failed.
    pub const CHECK_FAILED: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const INVALID_CHANNEL: i32 = 3;
    pub const PRECONDITION: i32 = 4;
    pub const CONVERGENCE: i32 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: exit::INPUT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::InvalidParameter(_) | Error::InsufficientTrials(_) => exit::INPUT,
            Error::NotCptp { .. }
            | Error::NotTracePreserving(_)
            | Error::NotHermitian(_)
            | Error::NotPsd(_)
            | Error::NotUnitary(_)
            | Error::InvalidTrace { .. }
            | Error::DimensionMismatch(_) => exit::INVALID_CHANNEL,
            Error::NotUnital(_) | Error::NotQubit(..) | Error::POutOfRange(_) | Error::SingularState(_) => {
                exit::PRECONDITION
            }
            Error::ConvergenceFailure | Error::SingularMarginal(_) => exit::CONVERGENCE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
