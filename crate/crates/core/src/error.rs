//! Error type shared by every module.

use thiserror::Error;

/// All indices carried by errors are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("topology text is empty")]
    EmptyInput,
    #[error("line 1: expected a positive cell count, found {0:?}")]
    BadCellCount(String),
    #[error("cell count {found} exceeds the supported maximum {max}")]
    CellCountTooLarge { found: usize, max: usize },
    #[error("expected {expected} matrix rows for K={expected}, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} characters, found {found}")]
    LineLength { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {col}: non-binary character {ch:?}")]
    NonBinary { row: usize, col: usize, ch: char },
    #[error("row {row}: receiver {row} is reached by no transmitter")]
    EmptyRow { row: usize },
    #[error("column {col}: transmitter {col} reaches no receiver")]
    EmptyColumn { col: usize },
    #[error("matrix is not square or not binary")]
    BadMatrix,
    #[error("{method}: K={k} exceeds the guard K<={max}")]
    GuardExceeded { method: &'static str, k: usize, max: usize },
    #[error("cycle {0:?} is not a Hamiltonian cycle of the alignment-feasible graph")]
    NotHamiltonian(Vec<usize>),
    #[error("certificate does not match the topology: {0}")]
    CertificateMismatch(String),
    #[error("malformed scheme: {0}")]
    MalformedScheme(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse {0:?} as a fraction p/q")]
    BadRational(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
