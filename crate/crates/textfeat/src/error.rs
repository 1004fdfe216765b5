use thiserror::Error;

pub type Result<T, E = TextError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("lexicon {name}, line {line}: {message}")]
    Lexicon {
        name: String,
        line: usize,
        message: String,
    },

    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("empty vocabulary after stop-word filtering")]
    EmptyVocabulary,

    #[error("empty training corpus")]
    EmptyCorpus,

    #[error("topic count must be at least 1, got {0}")]
    BadTopicCount(usize),

    #[error("scorer for slot {slot} must produce {expected} values, produces {actual}")]
    ScorerWidth {
        slot: String,
        expected: usize,
        actual: usize,
    },
}
