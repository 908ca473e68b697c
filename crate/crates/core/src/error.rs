use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A field or coefficient produced a non-finite value where a finite one was required.
    #[error("singular evaluation at {point:?}: {what}")]
    SingularEvaluation { point: Vec<f64>, what: String },

    /// A mathematical hypothesis required by the requested operation does not hold.
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn singular(point: &[f64], what: impl Into<String>) -> Self {
        Error::SingularEvaluation { point: point.to_vec(), what: what.into() }
    }
}
