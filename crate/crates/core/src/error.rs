use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("vector contains a non-finite component at index {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("provider returned {actual} vectors for {expected} texts")]
    CountMismatch { expected: usize, actual: usize },
    #[error("embedding provider unavailable: {0}")]
    ProviderUnavailable(String),

    #[error("book has no paragraphs")]
    EmptyBook,
    #[error("running centroid has zero norm at paragraph {0}")]
    DegenerateCentroid(usize),

    #[error("sequence too short: need at least {needed} values, got {actual}")]
    TooShort { needed: usize, actual: usize },

    #[error("need at least {k} vectors for k-means, got {actual}")]
    TooFewPoints { k: usize, actual: usize },
    #[error("archetype labelling requires k = 8, got {0}")]
    WrongK(usize),

    #[error("input has zero variance")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("control variable is perfectly correlated with an input")]
    DegenerateControl,
    #[error("selection is empty")]
    EmptySelection,

    #[error("invalid manifest, line {line}: {reason}")]
    ManifestInvalid { line: usize, reason: String },
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("store at {path} is locked by another writer")]
    StoreLocked { path: PathBuf },
    #[error("corrupt store record at byte {offset}: {reason}")]
    CorruptRecord { offset: u64, reason: String },
    #[error("invalid vector file {path}: {reason}")]
    VectorFormat { path: PathBuf, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
