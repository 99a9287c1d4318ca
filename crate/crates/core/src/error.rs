use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested grid, depth or table would exceed a fixed size cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A generated object broke one of its declared invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("eigensolver did not converge for eigenvalue index {index}")]
    Convergence { index: usize },

    /// The evaluation point carries no mass at the largest probed scale.
    #[error("point {x} is outside the support at scale {eps}")]
    OutsideSupport { x: f64, eps: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
