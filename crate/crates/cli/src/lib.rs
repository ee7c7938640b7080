//! Named experiments over the signaling closed forms, with CSV and JSON output.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod output;
pub mod run;
pub mod spec;

use nonlocal_signaling::Error;
use thiserror::Error as ThisError;

pub use run::{run, Check, Outcome, Row, Summary};
pub use spec::{ExperimentSpec, GridSpec, Parameters, RunPlan, Scenario, Spacing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, ThisError)]
pub enum CliError {
    /// Bad spec, config file or flags.
    #[error("invalid experiment: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Validation(_) | CliError::Io(_) => EXIT_VALIDATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature(_) => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
