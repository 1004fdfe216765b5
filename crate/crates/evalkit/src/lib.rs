//! Evaluation of repost classifiers: F1 per fold, per-group mean and spread,
//! mixture aggregation across groups, paired significance tests, a collinearity
//! screen and the `report.json` document tying an experiment together.

pub mod collinearity;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod report;
pub mod stats;

pub use collinearity::{collinearity_screen, pearson, CollinearityReport};
pub use error::{EvalError, Result};
pub use experiment::{build_report, fold_group, predict_fold, resolve_rows, run_experiment, ExperimentSpec, FoldPrediction, ModelKind, ModelSpec, MIXED_GROUP};
pub use metrics::{aggregate, f1, random_predictions, FoldScores};
pub use report::{Comparison, EvalReport, GroupRow, ImportanceRow, ModelReport, Overall, Pairing};
pub use stats::{paired_t_test, wilcoxon_exact, wilcoxon_normal, wilcoxon_signed_rank, TTest, Wilcoxon, WilcoxonMethod};
