use thiserror::Error;

/// Errors produced by the analytics and workflow layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty series: {0}")]
    EmptySeries(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("feature layout mismatch: model uses {model}, features use {features}")]
    LayoutMismatch { model: String, features: String },
    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { expected: u32, found: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Wav(#[from] hound::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// True for errors caused by caller-supplied data rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
