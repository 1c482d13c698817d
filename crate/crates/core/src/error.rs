use thiserror::Error;

use crate::solver::SolveReport;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("points per axis must be a power of two >= 16, got {0}")]
    InvalidResolution(usize),
    #[error("box length must be positive and finite, got {0}")]
    InvalidBoxLength(f64),
    #[error("dimension must be 1, 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("fractional order s must lie in (0, 1], got {0}")]
    InvalidOrder(f64),
    #[error("Lebesgue exponent must be >= 1, got {0}")]
    InvalidLebesgueExponent(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("operation requires the {required} regime")]
    WrongRegime { required: &'static str },
    #[error("zero field where a nontrivial one is required ({0})")]
    ZeroField(&'static str),
    #[error("invalid profile parameters: {0}")]
    InvalidProfile(String),
    #[error("no positive values in the decay-fit window: {0}")]
    DecayFit(String),
    #[error("{what} did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },
    #[error("{0}")]
    IllPosed(String),
    #[error("sufficient smallness condition fails: {0}")]
    SmallnessFails(String),
    #[error("invalid forcing: {0}")]
    InvalidForcing(String),
    #[error("solver stopped without certifying an interior minimizer: {reason}")]
    Solve {
        reason: String,
        report: Box<SolveReport>,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
