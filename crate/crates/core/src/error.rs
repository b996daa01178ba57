use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:e} exceeds {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("index {index} out of range for dimension {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("index list is not strictly increasing: {0:?}")]
    InvalidIndexSet(Vec<usize>),
    #[error("dimension {m} exceeds the exhaustive limit of {limit}")]
    DimensionTooLarge { m: usize, limit: usize },
    #[error("budget k = {k} outside [1, {m}]")]
    InvalidBudget { k: usize, m: usize },
    #[error("exhaustive search over {sets} sets (m = {m}, k = {k}) exceeds the cap of {cap}")]
    SearchSpaceTooLarge {
        m: usize,
        k: usize,
        sets: u128,
        cap: u128,
    },
    #[error("greedy trace and exact result were computed on different inputs")]
    MismatchedInputs,
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
