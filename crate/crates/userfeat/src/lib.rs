//! User features: profile and network (U-P), history activity and interaction
//! (U-HA), and history-averaged post content (U-HM).
//!
//! [`InstanceFeaturizer`] combines them with the post's own M vector into the
//! 303-value ALL vector in dictionary order.

pub mod error;
pub mod graph;
pub mod history;
pub mod instance;
pub mod interaction;
pub mod profile;

pub use error::{Result, UserError};
pub use graph::{leaderrank, FollowGraph};
pub use history::{activity_features, popularity_features, HistorySummary};
pub use instance::{FeaturizerConfig, InstanceFeaturizer, TextFeatureCache};
pub use interaction::{cosine_similarity, historical_post_features, interaction_features};
pub use profile::profile_features;
