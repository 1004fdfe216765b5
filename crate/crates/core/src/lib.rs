//! Shared domain model for repost-prediction experiments.
//!
//! The crate defines the raw records read from disk (`posts.jsonl`, `users.jsonl`),
//! the classification unit ([`Instance`]), the ordered 303-entry feature dictionary
//! and the `features.csv` table format. Everything here is immutable once built and
//! can be shared across threads freely.

pub mod corpus;
pub mod dictionary;
pub mod error;
pub mod event;
pub mod features;
pub mod hash;
pub mod post;
pub mod user;

pub use corpus::{load_corpus, Corpus, LoadReport, LoadWarning};
pub use dictionary::{feature_dictionary, FeatureKind, SchemaId};
pub use error::{CoreError, Result};
pub use event::{Instance, RepostEvent, REPOST_WINDOW_SECS};
pub use features::{FeatureTable, FeatureVector};
pub use post::{Metrics, PostType, RawPost};
pub use user::{UserRecord, MAX_HISTORY};

/// Seconds in one day; all time-valued features are reported in days.
pub const SECS_PER_DAY: f64 = 86_400.0;
