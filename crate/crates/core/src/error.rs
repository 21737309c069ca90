use thiserror::Error;

/// Errors raised by the model, filter, generation and estimation layers.
///
/// The variant names double as the diagnostics printed by the command-line
/// front end, so keep them stable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("OrderViolation: {zeros} zeros for {poles} poles (need at least one pole and fewer zeros than poles)")]
    OrderViolation { poles: usize, zeros: usize },

    #[error("RieszViolation: {0}")]
    RieszViolation(String),

    #[error("FactorizationFailure: {0}")]
    FactorizationFailure(String),

    #[error("Unsupported: {0}")]
    Unsupported(String),

    #[error("SignalTooShort: got {len} samples, need more than {needed}")]
    SignalTooShort { len: usize, needed: usize },

    #[error("QuadratureFailure: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("UndefinedVariance: {0}")]
    UndefinedVariance(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
