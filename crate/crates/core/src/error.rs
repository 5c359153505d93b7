use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("{what} did not converge (error estimate {error_estimate:.3e})")]
    NumericFailure { what: String, error_estimate: f64 },

    #[error("ill-conditioned inversion: imaginary residual {imaginary:.3e} against real part {real:.3e}")]
    IllConditioned { real: f64, imaginary: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("normalisation underflow: truncated mass is zero at standardized cap {0:.3}")]
    TailUnderflow(f64),

    #[error("no root: {0}")]
    NoRoot(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
