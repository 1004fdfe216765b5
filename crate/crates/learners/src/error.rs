use thiserror::Error;

pub type Result<T, E = LearnError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid labels: {0}")]
    Labels(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("feature schema mismatch: model expects {expected}, input has {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("non-finite loss at epoch {epoch}, batch {batch}: {detail}")]
    NonFiniteLoss { epoch: usize, batch: usize, detail: String },

    #[error("model file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] repostlab_core::CoreError),
}
