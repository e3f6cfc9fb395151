use thiserror::Error;

/// Errors raised by discretization and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular diagonal block in cell {cell} for angle {angle}")]
    SingularLocalBlock { cell: usize, angle: usize },

    #[error("diffusion matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("singular reduced system for angle {angle} at rank {rank}")]
    SingularReducedSystem { angle: usize, rank: usize },

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    MaxIterationsExceeded { iterations: usize, last_change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
