use thiserror::Error;

/// Errors raised by the numerical routines and the batch front-end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (achieved error {achieved:e}, requested {requested:e})")]
    Convergence {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("underflow: {0}")]
    Underflow(String),

    #[error("tempering function is not proper: q(0+) extrapolates to {limit} (expected 1)")]
    NotProper { limit: f64 },

    #[error("tempering function is not completely monotone: order {order} difference fails at x = {x}")]
    NotCompletelyMonotone { order: usize, x: f64 },

    #[error("grid too coarse: characteristic function has not decayed at the grid cutoff; need n >= {required_n}")]
    GridTooCoarse { required_n: usize },

    #[error("grid domain misses {missing_mass:e} of probability mass")]
    DomainTooNarrow { missing_mass: f64 },

    #[error("inversion produced a non-positive value {value:e} at x = {x} (achieved error {achieved:e})")]
    NonPositive { x: f64, value: f64, achieved: f64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
