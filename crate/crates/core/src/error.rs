use thiserror::Error;

/// Errors raised by the simulator, the learning pipeline and the attack bench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("cannot stratify: {0}")]
    Stratify(String),

    #[error("degenerate training data: {0}")]
    DegenerateData(String),

    #[error("shape mismatch: expected {expected} features, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("feature importance is not applicable to {0}")]
    NotApplicable(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("model file schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("i/o error")]
    Io(#[from] std::io::Error),

    #[error("csv error")]
    Csv(#[from] csv::Error),

    #[error("json error")]
    Json(#[from] serde_json::Error),

    #[error("config parse error")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
