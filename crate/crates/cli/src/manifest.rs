use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use repostlab_core::hash::file_sha256;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to re-run a command: its arguments, the effective
/// configuration, the seeds used, and content hashes of what it read and wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: BTreeMap<String, String>,
    pub config: RunConfig,
    pub seeds: BTreeMap<String, u64>,
    /// Input path → sha256.
    pub inputs: BTreeMap<String, String>,
    /// Artifact path relative to the manifest's directory → sha256.
    pub artifacts: BTreeMap<String, String>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        RunManifest {
            command: command.to_string(),
            arguments: BTreeMap::new(),
            config: config.clone(),
            seeds: BTreeMap::new(),
            inputs: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn argument(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.arguments.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(&mut self, key: &str, value: u64) -> &mut Self {
        self.seeds.insert(key.to_string(), value);
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let hash = file_sha256(path).with_context(|| format!("hashing input {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), hash);
        Ok(self)
    }

    /// Records `path`, which must lie under `base`.
    pub fn artifact(&mut self, base: &Path, path: &Path) -> Result<&mut Self> {
        let hash = file_sha256(path).with_context(|| format!("hashing artifact {}", path.display()))?;
        let rel = path.strip_prefix(base).unwrap_or(path);
        self.artifacts.insert(rel.to_string_lossy().replace('\\', "/"), hash);
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Manifest location for an artifact written to a single file.
pub fn manifest_for_file(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
