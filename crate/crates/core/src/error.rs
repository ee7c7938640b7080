use thiserror::Error as ThisError;

use crate::quad::QuadError;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("local signal {local:e} is too close to zero to form a ratio")]
    DivisionHazard { local: f64 },
    #[error("values change sign within the grid (index {index})")]
    SignChange { index: usize },
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}
