use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("NotSquare: matrix is {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("NotHermitian: max |M - M^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("NotIdempotent: max |M^2 - M| = {deviation:.3e}")]
    NotIdempotent { deviation: f64 },
    #[error("NotUnitNorm: |psi| = {norm}")]
    NotUnitNorm { norm: f64 },
    #[error("DimensionMismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("ZeroProjector: range is the zero subspace")]
    ZeroProjector,
    #[error("FullRankProjector: kernel is the zero subspace")]
    FullRankProjector,
    #[error("ZeroColumn: range basis vector is numerically zero")]
    ZeroColumn,
    #[error("CommutingOperators: |QP - PQ|_F = {norm:.3e}")]
    CommutingOperators { norm: f64 },
    #[error("PhiNotInRange: state does not lie in ran(Q)")]
    PhiNotInRange,
    #[error("InsufficientSamples: need at least {needed} distinct n, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("InvalidBounds: {0}")]
    InvalidBounds(String),
    #[error("DegenerateDraw: orthogonal component vanished after {retries} redraws")]
    DegenerateDraw { retries: usize },
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
