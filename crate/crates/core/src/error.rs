use thiserror::Error;

pub type Result<T> = std::result::Result<T, QkcError>;

#[derive(Debug, Error)]
pub enum QkcError {
    #[error("capacity exceeded: {requested} qubits requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot amplitude-encode a zero vector")]
    ZeroVector,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("complex-valued features are not supported by the {0} classifier")]
    ComplexFeatures(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QkcError {
    pub fn is_capacity(&self) -> bool {
        matches!(self, QkcError::Capacity { .. })
    }
}
