//! Classifiers for repost prediction: boosted trees, a small MLP, a TF-IDF
//! bag-of-words encoder for content-only baselines, grid search and gain-based
//! importance.

pub mod bow;
pub mod error;
pub mod gbdt;
pub mod grid;
pub mod importance;
pub mod matrix;
pub mod mlp;
pub mod persist;

pub use bow::{bow_encode, BowEncoder};
pub use error::{LearnError, Result};
pub use gbdt::{gbdt_train, GbdtModel, GbdtParams, Node, Tree};
pub use grid::{grid_search, GbdtGrid, GridResult, GridRow};
pub use importance::feature_importance;
pub use matrix::Matrix;
pub use mlp::{mlp_train, MlpConfig, MlpModel, MlpNetwork, Standardizer};
pub use persist::{Model, ModelFile, MODEL_FORMAT_VERSION};
