use thiserror::Error;

/// Errors raised by parameter validation, the simulators and the checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// Too many replicates ended without a certain classification.
    #[error("indeterminate fraction too large: {indeterminate} of {total} replicates unresolved")]
    IndeterminateFraction { indeterminate: u64, total: u64 },

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    /// The coupled pair left the order `L̄ <= L`. Always an implementation bug.
    #[error("coupling violated at t={time}: low={low}, high={high}")]
    CouplingViolation { time: f64, low: u64, high: u64 },

    #[error("hazard integration failed: {0}")]
    HazardIntegrationFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
