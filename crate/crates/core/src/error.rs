use thiserror::Error;

/// Errors raised by parameter validation, state algebra and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {what} has {got} samples, grid has {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("cannot normalize null state")]
    NullState,
    #[error("non-finite energy at iteration {iteration}: {detail}")]
    NonFinite { iteration: usize, detail: String },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("extend bracket: {0}")]
    Bracket(String),
    #[error("parameter mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
