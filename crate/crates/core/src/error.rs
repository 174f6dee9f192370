use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration path was asked to run on an instance that is too large.
    #[error("{what}: n = {n} exceeds the limit of {limit}")]
    Size {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("intersection contract undefined: both sets have value {value}")]
    DegeneratePair { value: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("LP model error: {0}")]
    LpModel(String),

    #[error("LP solver failure: {0}")]
    LpSolver(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn ensure_size(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Size { what, n, limit })
    } else {
        Ok(())
    }
}
