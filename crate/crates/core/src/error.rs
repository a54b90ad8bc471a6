use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no SSPS exists: r <= pi^2/2 (r = {r})")]
    NoSolution { r: f64 },
    #[error("nonlinearity is not odd: {0}")]
    Oddness(String),
    #[error("modulus equation right-hand side is not monotone on the bracket: {0}")]
    Monotonicity(String),
    #[error("simulation diverged: |x| = {value} exceeds {bound} at t = {t}")]
    Stability { t: f64, value: f64, bound: f64 },
    #[error("inconsistent construction: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
