//! Process-level error taxonomy.
//!
//! Every failure is classified by the exit code it should produce:
//!
//! | code | meaning                                    | variant    |
//! |------|--------------------------------------------|------------|
//! | 0    | success                                    | —          |
//! | 1    | runtime failure (I/O, engine, bad data)    | `Runtime`  |
//! | 2    | usage / configuration error                | `Usage`    |
//! | 3    | a validation-suite contract was violated   | `Contract` |

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad flags, malformed or invalid configuration, unknown names.
    #[error("{0}")]
    Usage(String),
    /// The run itself failed: I/O, file formats, engine errors.
    #[error("{0}")]
    Runtime(String),
    /// A statistical validation suite found its contract violated; the
    /// message states the violated inequality.
    #[error("{0}")]
    Contract(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Runtime(_) => 1,
            AppError::Usage(_) => 2,
            AppError::Contract(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        AppError::Runtime(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        AppError::Contract(msg.into())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<screenloop_core::Error> for AppError {
    fn from(e: screenloop_core::Error) -> Self {
        AppError::Runtime(format!("engine error: {e}"))
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Runtime(format!("csv error: {e}"))
    }
}

pub type AppResult<T> = Result<T, AppError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_documented_table() {
        assert_eq!(AppError::runtime("x").exit_code(), 1);
        assert_eq!(AppError::usage("x").exit_code(), 2);
        assert_eq!(AppError::contract("x").exit_code(), 3);
    }
}
