use thiserror::Error;

/// Errors raised by population construction, designs, estimators and the
/// verification engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid population: {0}")]
    InvalidPopulation(String),

    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("size weight of unit {unit} must be a positive integer")]
    InvalidWeight { unit: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("{what} = {value} is out of range ({constraint})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        constraint: String,
    },

    #[error("invalid count vector: {0}")]
    InvalidCounts(String),

    #[error("invalid adjacency: {0}")]
    InvalidAdjacency(String),

    #[error("invalid network partition: {0}")]
    InvalidPartition(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("instance too large to enumerate: {outcomes} outcomes exceeds the limit of {limit}")]
    TooLarge { outcomes: u128, limit: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn out_of_range(what: &'static str, value: u64, constraint: impl Into<String>) -> Error {
    Error::OutOfRange {
        what,
        value,
        constraint: constraint.into(),
    }
}
