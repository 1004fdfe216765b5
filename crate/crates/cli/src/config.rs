//! Run configuration read from `--config`. Every section is optional.

use std::path::Path;

use repostlab_core::SchemaId;
use repostlab_datasets::{Protocol, RatioTag};
use repostlab_evalkit::{ExperimentSpec, ModelSpec};
use repostlab_learners::GbdtParams;
use repostlab_synthgen::WorldConfig;
use repostlab_textfeat::LdaConfig;
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub ratio: RatioTag,
    pub seed: u64,
}

impl Default for DatasetSection {
    fn default() -> Self {
        DatasetSection {
            ratio: RatioTag::OneToFive,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub protocol: Protocol,
    /// Monte Carlo repetitions.
    pub repeats: usize,
    /// Train, validation and test fractions of the Monte Carlo protocols.
    pub fractions: [f64; 3],
    /// Training subsets per target hashtag in leave-one-hashtag-out.
    pub subsets: usize,
    pub windows: usize,
    pub train_windows: usize,
    pub seed: u64,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            protocol: Protocol::MixedMc,
            repeats: 10,
            fractions: [0.63, 0.07, 0.3],
            subsets: 3,
            windows: 5,
            train_windows: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    pub models: Vec<ModelSpec>,
    pub comparisons: Vec<(String, String)>,
    pub importance_model: Option<String>,
    pub threshold: f64,
}

impl Default for ExperimentSection {
    /// Boosted trees on ALL, U and M.
    fn default() -> Self {
        let params = GbdtParams::default();
        ExperimentSection {
            name: "experiment".to_string(),
            models: vec![
                ModelSpec::gbdt("DT-ALL", SchemaId::All, params),
                ModelSpec::gbdt("DT-U", SchemaId::U, params),
                ModelSpec::gbdt("DT-M", SchemaId::M, params),
            ],
            comparisons: Vec::new(),
            importance_model: None,
            threshold: 0.5,
        }
    }
}

impl ExperimentSection {
    pub fn spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            name: self.name.clone(),
            models: self.models.clone(),
            comparisons: self.comparisons.clone(),
            importance_model: self.importance_model.clone(),
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub world: WorldConfig,
    pub lda: LdaConfig,
    pub dataset: DatasetSection,
    pub split: SplitSection,
    pub experiment: ExperimentSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, UsageError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| UsageError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| UsageError(format!("config {}: {}", path.display(), e.0)))
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        self.world.validate().map_err(|e| UsageError(e.to_string()))?;
        let lda = &self.lda;
        if lda.k == 0 || lda.beta <= 0.0 || lda.alpha.is_some_and(|a| a <= 0.0) {
            return Err(UsageError("lda needs k >= 1 and positive priors".into()));
        }
        self.experiment.spec().validate().map_err(|e| UsageError(e.to_string()))?;
        for m in &self.experiment.models {
            if m.name.is_empty() || m.name.contains(['/', '\\']) || m.name.starts_with('.') {
                return Err(UsageError(format!("model name {:?} cannot be used as a directory name", m.name)));
            }
        }
        Ok(())
    }
}
