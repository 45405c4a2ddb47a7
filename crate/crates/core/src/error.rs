//! Crate-wide error type.

/// Error type shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid GeoJSON: {0}")]
    InvalidGeoJson(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("duplicate point id {0}")]
    DuplicateId(u64),

    #[error("point id {0} not found")]
    PointNotFound(u64),

    #[error("category {0:?} not found")]
    CategoryNotFound(String),

    #[error("no eligible neighbors: need at least 2 points")]
    NoEligibleNeighbors,

    #[error("origin {origin} cannot reach {unreachable} point(s) over the road network")]
    Disconnected { origin: u64, unreachable: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
