use thiserror::Error;

/// Errors raised while building or analysing Lindbladian generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimensions must be positive")]
    EmptyMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector of length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("{what} is not hermitian (deviation {deviation:e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("{0} is not a density matrix")]
    NotDensityMatrix(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dense decomposition failed: {0}")]
    Decomposition(String),

    #[error("zero eigenvalue of the generator is not semisimple (kernel overlap {0:e})")]
    NonSemisimpleZero(f64),

    #[error("no positive semidefinite stationary state could be extracted")]
    NoStationaryState,

    #[error("local dissipator is not ergodic (stationary dimension {0})")]
    NotErgodic(usize),

    #[error("kernel of the adjoint generator is not an algebra (residual {0:e})")]
    NotAnAlgebra(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
