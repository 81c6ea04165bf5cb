//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A field was used with a grid it does not live on.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The conservation totals admit no strictly positive equilibrium.
    #[error("no positive equilibrium: m24 = m14 + m23 - m13 = {m24} must be positive")]
    NoPositiveEquilibrium { m24: f64 },

    /// A solver or time step produced an unusable result (NaN, lost
    /// positivity, unconverged linear solve, broken conservation).
    #[error("numerical failure at t = {time}: {what}")]
    Numerical { time: f64, what: String },

    /// A Monte-Carlo estimator had no usable samples.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// A scenario file could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// One or more self-checks of the validate mode failed.
    #[error("validation failed: {failed} of {total} checks did not pass")]
    ValidationFailed { failed: usize, total: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn numerical(time: f64, what: impl Into<String>) -> Self {
        Error::Numerical {
            time,
            what: what.into(),
        }
    }

    pub(crate) fn param(what: impl Into<String>) -> Self {
        Error::InvalidParameter(what.into())
    }
}
