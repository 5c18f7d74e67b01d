use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite integrand sample at theta = {theta}")]
    NonFinite { theta: f64 },

    #[error("truncation failure: tail estimate {tail:e} still above tolerance at cutoff {cutoff}")]
    Truncation { cutoff: f64, tail: f64 },

    #[error("no convergence in {what} after {iterations} refinements (last change {last_change:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("argument x = {0} outside the validated series range [0, 0.9]")]
    OutOfValidatedRange(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("all samples below 1e-300; exponential type cannot be estimated")]
    Underflow,
}

pub type Result<T> = std::result::Result<T, Error>;
