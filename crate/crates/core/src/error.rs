use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A degree exceeds the supported cap.
    #[error("degree {degree} exceeds the supported maximum {max}")]
    Capacity { degree: usize, max: usize },

    /// A result that must be real carried a significant imaginary part.
    #[error("numerical consistency violated: {0}")]
    Numerical(String),

    /// Two positions that define an edge coincide.
    #[error("degenerate edge: |r_i - r_j| = {0:e} is below the threshold")]
    DegenerateEdge(f64),

    #[error("malformed coefficient cache: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
