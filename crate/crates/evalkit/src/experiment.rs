//! Fold-wise training and evaluation of declared models over a split plan.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use repostlab_core::{FeatureTable, SchemaId};
use repostlab_datasets::{Fold, SplitPlan};
use repostlab_learners::{
    feature_importance, gbdt_train, grid_search, mlp_train, GbdtGrid, GbdtParams, Matrix, MlpConfig, Model, ModelFile,
};
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::metrics::{f1, FoldScores};
use crate::report::{Comparison, EvalReport, ImportanceRow, ModelReport};

/// Group label of folds that pool all hashtags.
pub const MIXED_GROUP: &str = "mixed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelKind {
    Gbdt {
        #[serde(default)]
        params: GbdtParams,
        /// Tuned on each fold's validation part when present.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<GbdtGrid>,
    },
    Mlp {
        #[serde(default)]
        config: MlpConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub schema: SchemaId,
    #[serde(flatten)]
    pub kind: ModelKind,
}

impl ModelSpec {
    pub fn gbdt(name: &str, schema: SchemaId, params: GbdtParams) -> Self {
        ModelSpec {
            name: name.to_string(),
            schema,
            kind: ModelKind::Gbdt { params, grid: None },
        }
    }

    pub fn mlp(name: &str, schema: SchemaId, config: MlpConfig) -> Self {
        ModelSpec {
            name: name.to_string(),
            schema,
            kind: ModelKind::Mlp { config },
        }
    }

    /// Trains on `train` with `val` for early stopping and tuning.
    /// `table` already holds exactly this model's schema columns.
    pub fn fit(&self, table: &FeatureTable, train: &[usize], val: &[usize]) -> Result<ModelFile> {
        let x = Matrix::from_table(table);
        let (xt, yt) = (x.select_rows(train), pick(&table.labels, train));
        let (xv, yv) = (x.select_rows(val), pick(&table.labels, val));
        let val = (!val.is_empty()).then_some((&xv, &yv[..]));
        let names = table.names.clone();
        let model = match &self.kind {
            ModelKind::Gbdt { params, grid } => {
                let params = match (grid, val) {
                    (Some(grid), Some(v)) => grid_search((&xt, &yt), v, grid, params, &names)?.best,
                    _ => *params,
                };
                Model::Gbdt(gbdt_train(&xt, &yt, &params, val, names)?)
            }
            ModelKind::Mlp { config } => Model::Mlp(mlp_train(&xt, &yt, config, val, names)?),
        };
        Ok(ModelFile::new(&self.name, self.schema.as_str(), model))
    }
}

fn pick(labels: &[u8], rows: &[usize]) -> Vec<u8> {
    rows.iter().map(|&r| labels[r]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub models: Vec<ModelSpec>,
    /// Ordered (a, b) pairs; every pair in declaration order when empty.
    #[serde(default)]
    pub comparisons: Vec<(String, String)>,
    /// Tree model retrained on every instance for the importance ranking.
    #[serde(default)]
    pub importance_model: Option<String>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    0.5
}

impl ExperimentSpec {
    pub fn new(name: &str, models: Vec<ModelSpec>) -> Self {
        ExperimentSpec {
            name: name.to_string(),
            models,
            comparisons: Vec::new(),
            importance_model: None,
            threshold: default_threshold(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(EvalError::Arguments("experiment declares no models".into()));
        }
        let mut seen = HashSet::new();
        for m in &self.models {
            if !seen.insert(m.name.as_str()) {
                return Err(EvalError::Arguments(format!("model name {} declared twice", m.name)));
            }
        }
        for (a, b) in &self.comparisons {
            for n in [a, b] {
                if !seen.contains(n.as_str()) {
                    return Err(EvalError::UnknownModel(n.clone()));
                }
            }
        }
        if let Some(name) = &self.importance_model {
            match self.models.iter().find(|m| &m.name == name) {
                Some(ModelSpec { kind: ModelKind::Gbdt { .. }, .. }) => {}
                Some(_) => return Err(EvalError::Arguments(format!("importance model {name} is not a tree model"))),
                None => return Err(EvalError::UnknownModel(name.clone())),
            }
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(EvalError::Arguments(format!("threshold {} outside [0,1]", self.threshold)));
        }
        Ok(())
    }

    pub fn comparison_pairs(&self) -> Vec<(String, String)> {
        if !self.comparisons.is_empty() {
            return self.comparisons.clone();
        }
        let names: Vec<&String> = self.models.iter().map(|m| &m.name).collect();
        let mut pairs = Vec::new();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                pairs.push((names[i].clone(), names[j].clone()));
            }
        }
        pairs
    }
}

/// Test-part predictions of one model on one fold; enough to rebuild a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub model: String,
    pub schema: String,
    pub group: String,
    /// Index of the fold in its plan.
    pub fold: usize,
    pub instance_ids: Vec<String>,
    pub labels: Vec<u8>,
    pub predictions: Vec<u8>,
}

impl FoldPrediction {
    pub fn f1(&self) -> Result<f64> {
        f1(&self.labels, &self.predictions)
    }
}

pub fn fold_group(fold: &Fold) -> String {
    fold.group.clone().unwrap_or_else(|| MIXED_GROUP.to_string())
}

/// Row positions of `ids` in `index`.
pub fn resolve_rows(index: &HashMap<&str, usize>, ids: &[String]) -> Result<Vec<usize>> {
    ids.iter()
        .map(|id| index.get(id.as_str()).copied().ok_or_else(|| EvalError::Arguments(format!("instance {id} has no feature row"))))
        .collect()
}

/// Labels each test row of `fold` with `model`; `table` holds the model's columns.
pub fn predict_fold(model: &ModelFile, table: &FeatureTable, fold: &Fold, fold_index: usize, threshold: f64) -> Result<FoldPrediction> {
    let index = table.row_index();
    let rows = resolve_rows(&index, &fold.test)?;
    let part = table.select_rows(&rows);
    let proba = model.predict_table(&part)?;
    Ok(FoldPrediction {
        model: model.name.clone(),
        schema: model.schema.clone(),
        group: fold_group(fold),
        fold: fold_index,
        instance_ids: fold.test.clone(),
        labels: part.labels,
        predictions: proba.iter().map(|&p| u8::from(p >= threshold)).collect(),
    })
}

fn wrap(spec: &ModelSpec, fold: &Fold, i: usize) -> impl FnOnce(EvalError) -> EvalError {
    let (model, group) = (spec.name.clone(), fold_group(fold));
    move |e| EvalError::Fold {
        model,
        group,
        fold: i,
        source: Box::new(e),
    }
}

/// Trains and evaluates every model on every fold in parallel, then builds the report.
/// `table` must contain the columns of every declared schema.
pub fn run_experiment(table: &FeatureTable, plan: &SplitPlan, spec: &ExperimentSpec) -> Result<(EvalReport, Vec<FoldPrediction>)> {
    spec.validate()?;
    if plan.folds.is_empty() {
        return Err(EvalError::Empty("split plan has no folds".into()));
    }
    let tables: Vec<FeatureTable> = spec.models.iter().map(|m| table.select_schema(m.schema)).collect::<std::result::Result<_, _>>()?;
    let index = table.row_index();
    let jobs: Vec<(usize, usize)> = (0..spec.models.len()).flat_map(|m| (0..plan.folds.len()).map(move |f| (m, f))).collect();
    let predictions: Vec<FoldPrediction> = jobs
        .par_iter()
        .map(|&(m, f)| {
            let (model, fold) = (&spec.models[m], &plan.folds[f]);
            let run = || -> Result<FoldPrediction> {
                let train = resolve_rows(&index, &fold.train)?;
                let val = resolve_rows(&index, &fold.val)?;
                let file = model.fit(&tables[m], &train, &val)?;
                predict_fold(&file, &tables[m], fold, f, spec.threshold)
            };
            run().map_err(wrap(model, fold, f))
        })
        .collect::<Result<_>>()?;
    let importance = match &spec.importance_model {
        Some(name) => {
            let m = spec.models.iter().position(|s| &s.name == name).expect("validated");
            importance_on_all(&spec.models[m], &tables[m])?
        }
        None => Vec::new(),
    };
    let report = build_report(&spec.name, &plan.protocol.to_string(), &predictions, &spec.comparison_pairs(), importance)?;
    Ok((report, predictions))
}

/// Gain importance of `spec` trained on every row of `table`.
pub fn importance_on_all(spec: &ModelSpec, table: &FeatureTable) -> Result<Vec<ImportanceRow>> {
    let all: Vec<usize> = (0..table.len()).collect();
    let file = spec.fit(table, &all, &[])?;
    Ok(match &file.model {
        Model::Gbdt(g) => feature_importance(g).into_iter().map(|(feature, weight)| ImportanceRow { feature, weight }).collect(),
        Model::Mlp(_) => Vec::new(),
    })
}

/// Pure function of the predictions: models and groups keep first-appearance
/// order, folds within a group are ordered by fold index.
pub fn build_report(
    experiment: &str,
    protocol: &str,
    predictions: &[FoldPrediction],
    comparisons: &[(String, String)],
    importance: Vec<ImportanceRow>,
) -> Result<EvalReport> {
    if predictions.is_empty() {
        return Err(EvalError::Empty("no fold predictions".into()));
    }
    let mut models: Vec<(String, String)> = Vec::new();
    for p in predictions {
        if !models.iter().any(|(n, _)| n == &p.model) {
            models.push((p.model.clone(), p.schema.clone()));
        }
    }
    let mut reports = Vec::new();
    for (name, schema) in &models {
        let mut mine: Vec<&FoldPrediction> = predictions.iter().filter(|p| &p.model == name).collect();
        let mut groups: Vec<String> = Vec::new();
        for p in &mine {
            if !groups.contains(&p.group) {
                groups.push(p.group.clone());
            }
        }
        mine.sort_by_key(|p| p.fold);
        let scores = groups
            .iter()
            .map(|g| {
                let folds = mine.iter().filter(|p| &p.group == g).map(|p| p.f1()).collect::<Result<Vec<f64>>>()?;
                Ok(FoldScores { group: g.clone(), folds })
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(ModelReport::new(name, schema, &scores));
    }
    let find = |n: &str| reports.iter().find(|m| m.name == n).ok_or_else(|| EvalError::UnknownModel(n.to_string()));
    let comparisons = comparisons
        .iter()
        .map(|(a, b)| Comparison::between(find(a)?, find(b)?))
        .collect::<Result<Vec<_>>>()?;
    let report = EvalReport {
        experiment: experiment.to_string(),
        protocol: protocol.to_string(),
        models: reports,
        comparisons,
        importance,
    };
    report.validate()?;
    Ok(report)
}
