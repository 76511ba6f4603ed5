use thiserror::Error;

/// Errors raised by the numerical constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adaptive quadrature on [{lo}, {hi}] exhausted its subdivision budget (error estimate {estimate:e})")]
    NonConvergence { lo: f64, hi: f64, estimate: f64 },

    #[error("integrand returned non-finite value {value} at {at}")]
    NonFiniteSample { at: f64, value: f64 },

    #[error("{value} lies outside [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("alpha {reason} at y = {at}")]
    Domain { at: f64, reason: String },

    #[error("generating function vanishes at y = {at}; no positivity window")]
    NoPositivityWindow { at: f64 },

    #[error("generating constants c1 and c2 are both zero")]
    DegenerateConstants,

    #[error("formal power of order {requested} requested but only {available} were built")]
    NOrderExceeded { requested: usize, available: usize },

    #[error("compatibility condition violated: sup residual {residual:e} exceeds {tolerance:e}")]
    Compatibility { residual: f64, tolerance: f64 },

    #[error("input is not a solution: sup residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("least-squares system is ill-conditioned (condition estimate {condition:e}); add regularization")]
    IllConditioned { condition: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
