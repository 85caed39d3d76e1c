use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid spacing {spacing} exceeds {limit} required by {what}")]
    GridTooCoarse {
        what: &'static str,
        spacing: f64,
        limit: f64,
    },

    #[error("fixed-point iteration diverged after {} iterations", history.len())]
    Divergence { history: Vec<f64> },

    #[error("solution did not converge")]
    NotConverged,

    #[error("direct problem is not well-posed: {0}")]
    IllPosed(String),

    #[error("boundary basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("field lives on a different grid")]
    GridMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
