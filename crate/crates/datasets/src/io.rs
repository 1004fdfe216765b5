use std::path::Path;

use repostlab_core::corpus::{read_jsonl, write_jsonl};
use repostlab_core::Instance;

use crate::build::{DatasetReport, LabeledDataset, RatioTag};
use crate::error::{DatasetError, Result};

#[derive(serde::Serialize, serde::Deserialize)]
struct Header {
    ratio: RatioTag,
    seed: u64,
    report: DatasetReport,
}

/// Writes `instances.jsonl` and `dataset.json` into `dir`.
pub fn save_dataset(ds: &LabeledDataset, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| DatasetError::io(dir, e))?;
    write_jsonl(&dir.join("instances.jsonl"), &ds.instances)?;
    let header = Header {
        ratio: ds.ratio,
        seed: ds.seed,
        report: ds.report.clone(),
    };
    let path = dir.join("dataset.json");
    std::fs::write(&path, serde_json::to_string_pretty(&header)?).map_err(|e| DatasetError::io(&path, e))?;
    Ok(())
}

pub fn load_dataset(dir: &Path) -> Result<LabeledDataset> {
    let path = dir.join("dataset.json");
    let text = std::fs::read_to_string(&path).map_err(|e| DatasetError::io(&path, e))?;
    let header: Header = serde_json::from_str(&text)?;
    let instances: Vec<Instance> = read_jsonl(&dir.join("instances.jsonl"))?;
    for i in &instances {
        i.validate()?;
    }
    Ok(LabeledDataset {
        ratio: header.ratio,
        seed: header.seed,
        instances,
        report: header.report,
    })
}
