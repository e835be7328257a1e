use num_bigint::BigInt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ambient rank mismatch: {left} vs {right}")]
    AmbientRankMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: BigInt },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("degenerate lattice: split off the zero summand first")]
    DegenerateLattice,

    #[error("degree {degree} out of range 3..={b}")]
    DegreeOutOfRange { degree: usize, b: usize },

    #[error("indices ({i},{j},{k}) are not strictly increasing within 1..={b}")]
    InvalidTriple { i: usize, j: usize, k: usize, b: usize },

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("shuffle sign undefined: {0}")]
    InvalidShuffle(String),

    #[error("rank constraint {0} is outside {{0, 1}}")]
    InvalidRankConstraint(usize),

    #[error("classification requires b1 = 3 or 4, got {0}")]
    UnsupportedBetti(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
