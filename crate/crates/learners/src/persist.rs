use std::path::Path;

use repostlab_core::hash::dictionary_hash;
use repostlab_core::FeatureTable;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::gbdt::GbdtModel;
use crate::matrix::Matrix;
use crate::mlp::MlpModel;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Gbdt(GbdtModel),
    Mlp(MlpModel),
}

impl Model {
    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Gbdt(m) => &m.feature_names,
            Model::Mlp(m) => &m.feature_names,
        }
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        match self {
            Model::Gbdt(m) => m.predict_proba(x),
            Model::Mlp(m) => m.predict_proba(x),
        }
    }
}

/// Versioned on-disk model with the hash of its ordered feature names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub name: String,
    pub schema: String,
    pub dictionary_hash: String,
    pub model: Model,
}

impl ModelFile {
    pub fn new(name: &str, schema: &str, model: Model) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            name: name.to_string(),
            schema: schema.to_string(),
            dictionary_hash: dictionary_hash(model.feature_names()),
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(LearnError::Format(format!("format version {} is not supported", f.format_version)));
        }
        let actual = dictionary_hash(f.model.feature_names());
        if actual != f.dictionary_hash {
            return Err(LearnError::Format(format!("stored dictionary hash {} does not match its feature names ({actual})", f.dictionary_hash)));
        }
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| LearnError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LearnError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        ModelFile::from_json(&text)
    }

    /// Probabilities for `table`, which must carry exactly the model's columns in order.
    pub fn predict_table(&self, table: &FeatureTable) -> Result<Vec<f64>> {
        let found = dictionary_hash(&table.names);
        if found != self.dictionary_hash {
            return Err(LearnError::SchemaMismatch {
                expected: format!("dictionary {}", self.dictionary_hash),
                found: format!("dictionary {found}"),
            });
        }
        self.model.predict_proba(&Matrix::from_table(table))
    }
}
