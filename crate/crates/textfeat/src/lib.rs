//! Post-content (M) features.
//!
//! The 78-value M vector is assembled by [`PostFeaturizer`] from:
//! topic scorers and an LDA topic model, lexical counts, the pluggable
//! [`ScorerRegistry`] (grammar, polarity, irony, ...), readability formulas,
//! the lexicon sentiment scorer, emotion and hate-speech scores, and the hashtag code.
//!
//! All built-in scorers are deterministic keyword/lexicon heuristics with the same
//! output shapes and ranges as the neural models they stand in for.

pub mod error;
pub mod lda;
pub mod lexical;
pub mod lexicon;
pub mod post;
pub mod readability;
pub mod scorers;
pub mod sentiment;
pub mod tokenize;

pub use error::{Result, TextError};
pub use lda::{lda_infer, lda_train, LdaConfig, TopicModel};
pub use lexical::lexical_stats;
pub use lexicon::Lexicons;
pub use post::{post_features, HashtagVocab, PostFeaturizer};
pub use readability::{readability_scores, Readability};
pub use scorers::{ScorerRegistry, Slot, TextScorer};
pub use sentiment::{sentiment_scores, SentimentAnalyzer, SentimentLabel, SentimentScores};

/// 64-bit FNV-1a, used to derive per-text seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
