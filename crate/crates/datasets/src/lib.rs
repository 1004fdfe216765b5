//! Labeled instance sets and evaluation splits.
//!
//! Positives are observed shares within 24 hours of their parent. Negatives are
//! the nearest non-reposted same-hashtag posts from the preceding 24 hours
//! (1:1, 1:5, 1:10 with 5 extra random posts), or random causally valid
//! (post, user) pairs for the general scheme.

pub mod build;
pub mod error;
pub mod io;
pub mod leakage;
pub mod pool;
pub mod positives;
pub mod seed;
pub mod splits;

pub use build::{
    build_dataset, cosine_distance, general_negatives, hashtags_of, positives_with_pools, ranking_vector, select_negatives, DatasetReport, LabeledDataset,
    RatioTag,
};
pub use error::{DatasetError, Result};
pub use io::{load_dataset, save_dataset};
pub use leakage::leakage_filter;
pub use pool::NegativeIndex;
pub use positives::{enumerate_positives, PositiveReport};
pub use splits::{
    remove_cross_hashtag_pairs, split_leave_one_hashtag_out, split_loho_all, split_monte_carlo, split_perhash_mc, split_temporal, split_temporal_all,
    Fold, Protocol, SplitPlan,
};
