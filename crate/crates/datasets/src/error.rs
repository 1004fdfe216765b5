use thiserror::Error;

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("feature computation failed for instance {instance}: {message}")]
    Feature { instance: String, message: String },

    #[error("general negative sampling gave up after {draws} draws with {found} of {wanted} negatives")]
    SamplingExhausted { draws: usize, found: usize, wanted: usize },

    #[error("dataset too small: {0}")]
    TooSmall(String),

    #[error("hashtag `{0}` not in dataset")]
    UnknownHashtag(String),

    #[error("invalid split arguments: {0}")]
    BadArguments(String),

    #[error("unknown {kind} `{value}`")]
    UnknownName { kind: &'static str, value: String },

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] repostlab_core::CoreError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl DatasetError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
