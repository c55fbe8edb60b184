use thiserror::Error;

use crate::pairs::Condition;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: |a[{row},{col}] - conj(a[{col},{row}])| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("rows have unequal lengths (row {row} has {found} entries, expected {expected})")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("wrong dimension: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("condition {condition} violated: {detail}")]
    ConditionsViolated { condition: Condition, detail: String },

    #[error("comparison matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    ComparisonNotPsd { min_eigenvalue: f64 },

    /// Indices are 0-based; the message is 1-based.
    #[error(
        "not a CLDUI operator: entry ({}, {}) has magnitude {magnitude:e} outside the invariant pattern",
        .row + 1,
        .col + 1
    )]
    NotCldul { row: usize, col: usize, magnitude: f64 },

    #[error("unsupported local dimension {0} (supported: 2..=5)")]
    UnsupportedDimension(usize),

    #[error("expected {expected} eigenvalues, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("eigenvalues are not sorted in descending order at position {0}")]
    NotSorted(usize),

    #[error("eigenvalue {value:e} at position {index} is negative")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("document error: {0}")]
    Document(String),
}
