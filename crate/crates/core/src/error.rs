use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("negative discriminant: w = {w} exceeds m^2/4 = {limit}")]
    Discriminant { w: f64, limit: f64 },
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },
    #[error("value {0} outside the working range")]
    OutOfRange(f64),
    #[error("pole at {0}")]
    Pole(f64),
    #[error("forbidden eigenvalue {0}")]
    Forbidden(f64),
    #[error("graph has {size} vertices, above the dense cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("lambda {0} outside the spectral band")]
    OutOfBand(f64),
    #[error("graphs do not form an edge-graph pair")]
    MismatchedPair,
    #[error("function is not a 6-eigenfunction: triangle sum {0} at cell {1}")]
    NotInE6(f64, usize),
    #[error("level set degenerates at lambda {0}")]
    Degenerate(f64),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
