//! Synthetic social worlds for testing repost predictors against a known
//! generative model.
//!
//! A world has users with latent activity and hashtag interests, a
//! preferential-attachment follow graph, per-user histories and one batch of
//! hashtag-tagged original posts. Cascades then expose every original to the
//! author's followers plus a small random sample of non-followers; each exposed
//! user reposts with probability
//!
//! ```text
//! logistic(base + α_follow·follows + α_interact·interacted + α_activity·activity
//!          + β_topic·interest + β_sentiment·valence)
//! ```
//!
//! Every random choice derives from the config seed, so equal configs give
//! byte-identical corpus files.

pub mod cascade;
pub mod config;
pub mod error;
pub mod vocab;
pub mod world;

pub use cascade::{generate_cascades, Cascades, Exposure, Repost};
pub use config::{BehaviorWeights, WorldConfig};
pub use error::{Result, SynthError};
pub use vocab::{build_vocabularies, FUNCTION_WORDS, NEGATIVE_WORDS, POSITIVE_WORDS};
pub use world::{generate_world, logistic, World};
