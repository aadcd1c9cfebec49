use thiserror::Error;

use crate::model::{ResponseCategory, TruthLabel};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no {0} trials: sample proportion is undefined")]
    EmptySample(TruthLabel),

    #[error("both trial totals must be positive (n_same={n_same}, n_diff={n_diff})")]
    ZeroTotals { n_same: u64, n_diff: u64 },

    #[error("count {count} exceeds trial total {total}")]
    InconsistentCount { count: u64, total: u64 },

    #[error("count table totals disagree with cell counts for {truth}: cells sum to {sum}, total is {total}")]
    TotalMismatch { truth: TruthLabel, sum: u64, total: u64 },

    #[error("beta shape parameters must be finite and positive, got a={a}, b={b}")]
    InvalidHyper { a: f64, b: f64 },

    #[error("uninformative prior cells for {truth} differ between {first} and {other}")]
    NonUniformPrior { truth: TruthLabel, first: ResponseCategory, other: ResponseCategory },

    #[error("cannot average an empty collection")]
    EmptyCollection,

    #[error("expected {expected} weights, got {found}")]
    WeightCount { expected: usize, found: usize },

    #[error("weights must be finite and positive, got {0}")]
    InvalidWeight(f64),

    #[error("examiner {0:?} is not in the group")]
    UnknownExaminer(String),

    #[error("examiner {0:?} appears more than once in the group")]
    DuplicateExaminer(String),

    #[error("leave-one-out needs at least 2 examiners, group has {0}")]
    GroupTooSmall(usize),

    #[error("record for examiner {found:?} cannot update the model of {expected:?}")]
    ExaminerMismatch { expected: String, found: String },

    #[error("{what} is outside the domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("grid needs at least {min} points, got {found}")]
    GridTooSmall { min: usize, found: usize },

    #[error("row {row}, column {column} ({name}): {message}")]
    Parse { row: u64, column: usize, name: String, message: String },

    #[error("row {row}: missing column {column} ({name})")]
    MissingColumn { row: u64, column: usize, name: String },

    #[error("row {row}: duplicate record for examiner {examiner:?}, pair {pair:?} (first seen on row {first_row})")]
    DuplicateRecord { row: u64, first_row: u64, examiner: String, pair: String },

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("trial schedule must be non-empty and strictly increasing")]
    InvalidSchedule,

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
