use thiserror::Error;

/// Errors raised by state construction and the metrological routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("negative eigenvalue {0:e} beyond clamp tolerance")]
    NegativeEigenvalue(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("decomposition size {size} smaller than rank {rank}")]
    SizeTooSmall { size: usize, rank: usize },

    #[error("closed forms disagree: {what} (difference {difference:e})")]
    InternalMismatch { what: &'static str, difference: f64 },

    #[error("state is singular (smallest eigenvalue {0:e})")]
    SingularState(f64),

    #[error("decomposition does not reconstruct the state (error {0:e})")]
    BadDecomposition(f64),

    #[error("state has rank {0}, expected 2")]
    NotRankTwo(usize),

    #[error("dimension {0} too large for exhaustive search (max {1})")]
    TooLarge(usize, usize),

    #[error("gradient norm vanishes ({0:e})")]
    DegenerateGradient(f64),

    #[error("target {target} outside the open interval (1, {max})")]
    TargetOutOfRange { target: f64, max: f64 },

    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,

    #[error("step {0:e} leaves the positive-definite cone")]
    StepTooLarge(f64),

    #[error("{0} qubits exceed the dense limit of {1}")]
    TooManyQubits(usize, usize),

    #[error("state has weight {0:e} outside the GHZ subspace")]
    NotInSubspace(f64),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown suite '{0}' (expected core, bounds, averages, landscape, spin or all)")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
