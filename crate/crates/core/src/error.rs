use thiserror::Error;

use crate::index::QIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} outside the stored range +/-{extent}")]
    IndexOutOfRange { index: QIndex, extent: i64 },

    #[error("phase undefined at index {index}: |S| = {magnitude:e}")]
    UndefinedPhase { index: QIndex, magnitude: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("structure factor magnitude too small: {magnitude:e}")]
    MagnitudeTooSmall { magnitude: f64 },

    #[error("closure cosine {value} outside [-1, 1] beyond clamp tolerance")]
    CosOutOfRange { value: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("brute-force sum too large: N = {n} exceeds the cap {cap} for order {order}")]
    TooLarge { n: usize, cap: usize, order: usize },

    #[error("contradictory measurements: no hypothesis survives at index {index}")]
    ContradictoryMeasurements { index: i64 },

    #[error("insufficient coverage: no usable closure equation determines index {index}")]
    InsufficientCoverage { index: i64 },

    #[error("hypothesis count {count} exceeds the branch limit {limit}")]
    BranchLimitExceeded { count: usize, limit: usize },

    #[error("all hypotheses were pruned by fourth-order samples")]
    AllHypothesesPruned,
}

pub type Result<T> = std::result::Result<T, Error>;
