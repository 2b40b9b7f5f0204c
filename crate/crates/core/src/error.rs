use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graph is disconnected; {0} requires a connected graph")]
    Disconnected(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Fixed-point iteration hit its step cap; carries the last iterate.
    #[error("iteration limit of {steps} steps reached")]
    IterationLimit { steps: usize, last: Vec<f64> },

    /// Iterative solver gave up. `best` is the best value or bound reached.
    #[error("{what} did not converge after {iterations} iterations (best {best:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        best: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
