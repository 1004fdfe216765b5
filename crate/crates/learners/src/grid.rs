use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::gbdt::{gbdt_train, GbdtParams};
use crate::matrix::{f1_score, Matrix};

/// Value lists per hyperparameter; configurations enumerate in the nesting
/// order max_depth, learning_rate, n_estimators, min_child_weight, subsample,
/// scale_pos_weight (last varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtGrid {
    pub max_depth: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub n_estimators: Vec<usize>,
    pub min_child_weight: Vec<f64>,
    pub subsample: Vec<f64>,
    pub scale_pos_weight: Vec<f64>,
}

impl GbdtGrid {
    /// The search grid for a dataset with `negatives_per_positive` negatives per
    /// positive; class weighting is searched only for 1:5 and 1:10.
    pub fn standard(negatives_per_positive: usize) -> Self {
        let scale_pos_weight = match negatives_per_positive {
            5 => vec![1.0, 2.0, 3.0, 4.0, 5.0],
            10 => vec![1.0, 3.25, 5.5, 7.75, 10.0],
            _ => vec![1.0],
        };
        GbdtGrid {
            max_depth: vec![6, 7, 8, 9, 10],
            learning_rate: vec![0.3, 0.35, 0.4],
            n_estimators: vec![100, 150, 200],
            min_child_weight: vec![1.0, 2.0, 3.0],
            subsample: vec![0.8, 0.9, 1.0],
            scale_pos_weight,
        }
    }

    pub fn single(p: &GbdtParams) -> Self {
        GbdtGrid {
            max_depth: vec![p.max_depth],
            learning_rate: vec![p.learning_rate],
            n_estimators: vec![p.n_estimators],
            min_child_weight: vec![p.min_child_weight],
            subsample: vec![p.subsample],
            scale_pos_weight: vec![p.scale_pos_weight],
        }
    }

    pub fn len(&self) -> usize {
        self.max_depth.len()
            * self.learning_rate.len()
            * self.n_estimators.len()
            * self.min_child_weight.len()
            * self.subsample.len()
            * self.scale_pos_weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Configurations in canonical order; fields outside the grid come from `base`.
    pub fn configs(&self, base: &GbdtParams) -> Vec<GbdtParams> {
        let mut out = Vec::with_capacity(self.len());
        for &max_depth in &self.max_depth {
            for &learning_rate in &self.learning_rate {
                for &n_estimators in &self.n_estimators {
                    for &min_child_weight in &self.min_child_weight {
                        for &subsample in &self.subsample {
                            for &scale_pos_weight in &self.scale_pos_weight {
                                out.push(GbdtParams {
                                    max_depth,
                                    learning_rate,
                                    n_estimators,
                                    min_child_weight,
                                    subsample,
                                    scale_pos_weight,
                                    ..*base
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub params: GbdtParams,
    pub val_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: GbdtParams,
    pub best_f1: f64,
    pub rows: Vec<GridRow>,
}

/// Trains every configuration on `train` (early stopping on `val`) and keeps the
/// one with the highest validation F1; ties go to the earliest configuration.
pub fn grid_search(train: (&Matrix, &[u8]), val: (&Matrix, &[u8]), grid: &GbdtGrid, base: &GbdtParams, names: &[String]) -> Result<GridResult> {
    let configs = grid.configs(base);
    if configs.is_empty() {
        return Err(LearnError::Params("empty hyperparameter grid".into()));
    }
    let rows: Vec<GridRow> = configs
        .into_par_iter()
        .map(|params| {
            let model = gbdt_train(train.0, train.1, &params, Some(val), names.to_vec())?;
            let pred = model.predict_labels(val.0)?;
            Ok(GridRow {
                params,
                val_f1: f1_score(val.1, &pred),
            })
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.val_f1 > rows[best].val_f1 {
            best = i;
        }
    }
    Ok(GridResult {
        best: rows[best].params,
        best_f1: rows[best].val_f1,
        rows,
    })
}
