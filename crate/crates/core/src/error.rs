use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution, channel or parameter failed validation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Shapes or alphabet sizes of two objects disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Conditioning on an event of probability zero.
    #[error("conditioning on zero-probability event: {0}")]
    ZeroProbability(String),

    /// Channel spec file could not be read or parsed.
    #[error("channel spec: {0}")]
    Spec(String),

    /// A computational budget (codebook size, enumeration, grid) would be exceeded.
    #[error("guard exceeded: {0}")]
    Guard(String),

    /// An iterative solver hit its iteration cap before certifying convergence.
    #[error("no convergence after {iterations} iterations (gap {gap:.3e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn dim(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

pub(crate) fn guard(msg: impl Into<String>) -> Error {
    Error::Guard(msg.into())
}
