//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested size would exceed the configured node budget.
    #[error("resource error: {what} needs {required} nodes, budget is {budget}")]
    Resource {
        what: String,
        required: usize,
        budget: usize,
    },

    /// A numerical result failed an accuracy self-check.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// An iterative method stopped before meeting its tolerance.
    #[error("convergence error: {message} (best residuals: {residuals:?})")]
    Convergence {
        message: String,
        residuals: Vec<f64>,
    },

    /// Results contradict a structural guarantee of the problem.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A matrix expected to be positive definite was not.
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Unsupported(_) => 2,
            Error::Resource { .. } => 3,
            Error::Convergence { .. } | Error::Accuracy(_) | Error::NotPositiveDefinite(_) => 4,
            Error::Consistency(_) => 5,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
