use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid world config: {0}")]
    Config(String),
    #[error("cannot read world config {path}: {message}")]
    ConfigFile { path: String, message: String },
    #[error(transparent)]
    Core(#[from] repostlab_core::CoreError),
}

pub type Result<T> = std::result::Result<T, SynthError>;
