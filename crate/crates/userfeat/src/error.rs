use thiserror::Error;

pub type Result<T, E = UserError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum UserError {
    #[error("follow graph has no nodes")]
    EmptyGraph,

    #[error("unknown user `{0}`")]
    UnknownUser(String),

    #[error("unknown post `{0}`")]
    UnknownPost(String),

    #[error("feature cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Core(#[from] repostlab_core::CoreError),
}
