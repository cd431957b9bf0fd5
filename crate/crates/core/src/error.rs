use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// One of the two actual classes has no examples.
    #[error("degenerate class: P = {positives}, N = {negatives} (both classes must be non-empty)")]
    DegenerateClass { positives: u64, negatives: u64 },

    #[error("negative count for {field}: {value}")]
    NegativeCount { field: &'static str, value: i64 },

    #[error("tp = {tp}, tn = {tn} exceed class totals P = {p}, N = {n}")]
    CountExceedsTotal { tp: u64, tn: u64, p: u64, n: u64 },

    #[error("unknown label {label:?} at pair {index}")]
    UnknownLabel { label: String, index: usize },

    #[error("no prediction pairs")]
    EmptyPredictions,

    #[error("positive and negative labels are identical ({0:?})")]
    AmbiguousLabels(String),

    #[error(
        "mismatched populations: left has P = {left_p}, N = {left_n}; right has P = {right_p}, N = {right_n}"
    )]
    MismatchedPopulation {
        left_p: u64,
        left_n: u64,
        right_p: u64,
        right_n: u64,
    },

    /// HMNC sensitivity is undefined at tp + tn = 0.
    #[error("sensitivity undefined at tp = tn = 0")]
    UndefinedSensitivity,

    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}
