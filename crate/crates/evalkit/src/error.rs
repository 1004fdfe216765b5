use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty input: {0}")]
    Empty(String),
    #[error("length mismatch: {0} vs {1}")]
    Length(usize, usize),
    #[error("non-binary value {0}")]
    NonBinary(u8),
    #[error("differences have zero variance; the t statistic is undefined")]
    ZeroVariance,
    #[error("all paired differences are zero")]
    AllZero,
    #[error("{0}")]
    Arguments(String),
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("invalid report: {0}")]
    Report(String),
    #[error("model {model}, group {group}, fold {fold}: {source}")]
    Fold {
        model: String,
        group: String,
        fold: usize,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Learn(#[from] repostlab_learners::LearnError),
    #[error(transparent)]
    Core(#[from] repostlab_core::CoreError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl EvalError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, EvalError>;
