use thiserror::Error;

/// Errors raised by the numerical kernels, the distribution and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested a moment of order r >= 1, which is infinite for CEL.
    #[error("moment does not exist for r ≥ 1 (requested r = {0})")]
    MomentDoesNotExist(f64),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{routine} did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{failures} of {replications} replications failed at n = {n}")]
    TooManyFailures { n: usize, failures: usize, replications: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for failures of an iterative method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bracket { .. } | Error::NoConvergence { .. } | Error::TooManyFailures { .. }
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects NaN and infinities with a domain error naming the argument.
pub(crate) fn require_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be finite, got {value}")))
    }
}
