use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid is not square: row {row} has {len} cells, expected {expected}")]
    NonSquareGrid { row: usize, len: usize, expected: usize },

    #[error("value {value} at ({row}, {col}) is outside [0, 1]")]
    OutOfRangeValue { row: usize, col: usize, value: f64 },

    #[error("diagonal cell ({index}, {index}) is {value}, expected 0.5")]
    DiagonalConflict { index: usize, value: f64 },

    #[error("at least 3 alternatives are required, got {0}")]
    TooFewAlternatives(usize),

    #[error("relation has no known off-diagonal preference")]
    EmptyRelation,

    #[error("index ({i}, {k}) out of range for {n} alternatives")]
    IndexOutOfRange { i: usize, k: usize, n: usize },

    #[error("pair ({0}, {0}) lies on the diagonal")]
    DiagonalPair(usize),

    #[error("{} missing cell(s) cannot be estimated, first at ({}, {})", .cells.len(), .cells[0].0, .cells[0].1)]
    Unestimable { cells: Vec<(usize, usize)> },

    #[error("cannot aggregate an empty list")]
    EmptyList,

    #[error("dimension mismatch: {left} vs {right} alternatives")]
    DimensionMismatch { left: usize, right: usize },

    #[error("at least 2 experts are required, got {0}")]
    TooFewExperts(usize),

    #[error("{name} = {value} is outside [0, 1]")]
    InvalidWeight { name: &'static str, value: f64 },

    #[error("invalid annealing parameters: {0}")]
    InvalidParams(String),

    #[error("panel shapes differ")]
    ShapeMismatch,

    #[error("cannot blank {requested} cells while keeping the relation completable (managed {achieved})")]
    InfeasibleMask { requested: usize, achieved: usize },

    #[error("invalid panel document: {0}")]
    InvalidDocument(String),
}
