use std::path::PathBuf;

use crate::types::ClusterId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty cluster")]
    EmptyCluster,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite feature value {value} at point {point}, coordinate {coord}")]
    NonFinite {
        point: usize,
        coord: usize,
        value: f64,
    },

    #[error("invalid label {0}: labels must be >= -1")]
    InvalidLabel(i64),

    #[error("negative deviation {0}")]
    NegativeDeviation(f64),

    #[error("no seeded clusters remain")]
    NoClusters,

    #[error("no seeds")]
    NoSeeds,

    #[error("duplicate seed for point {0}")]
    DuplicateSeed(usize),

    #[error("seed references unknown point {id} (dataset has {n} points)")]
    UnknownPoint { id: usize, n: usize },

    #[error("unknown cluster id {0}")]
    UnknownCluster(ClusterId),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("max_n_iterations must be at least 1")]
    ZeroIterations,

    #[error("infeasible seed quota: {0}")]
    InfeasibleQuota(String),

    #[error("dataset has no ground-truth labels")]
    MissingTruth,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("model file: {0}")]
    Model(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
