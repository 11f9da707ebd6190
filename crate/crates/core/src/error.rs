use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} is singular at {value}")]
    SingularArgument { name: &'static str, value: f64 },
    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },
    #[error("circulant embedding is not nonnegative (min eigenvalue {min_eigenvalue:e})")]
    Embedding { min_eigenvalue: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("{what}: accuracy target missed (estimate {estimate:e}, error bound {bound:e})")]
    Accuracy {
        what: &'static str,
        estimate: f64,
        bound: f64,
    },
    #[error("system is ill-conditioned (condition estimate {0:e})")]
    Conditioning(f64),
    #[error("information matrix is not positive definite")]
    DegenerateInformation,
    #[error("every replication failed to converge")]
    AllReplicationsFailed,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        name,
        reason: reason.into(),
    }
}
