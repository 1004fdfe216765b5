//! The `report.json` document and its plain-text rendering.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::metrics::{aggregate, FoldScores};
use crate::stats::{paired_t_test, wilcoxon_signed_rank};

/// Scores are checked against their stored summaries to this tolerance.
const SUMMARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: String,
    pub mu: f64,
    pub sigma: f64,
    pub folds: Vec<f64>,
}

impl GroupRow {
    pub fn from_scores(s: &FoldScores) -> Self {
        GroupRow {
            group: s.group.clone(),
            mu: s.mu(),
            sigma: s.sigma(),
            folds: s.folds.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overall {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    pub schema: String,
    pub per_group: Vec<GroupRow>,
    pub overall: Overall,
}

impl ModelReport {
    pub fn new(name: &str, schema: &str, groups: &[FoldScores]) -> Self {
        let per_group: Vec<GroupRow> = groups.iter().map(GroupRow::from_scores).collect();
        let (mu, sigma) = aggregate(&per_group.iter().map(|g| (g.mu, g.sigma)).collect::<Vec<_>>());
        ModelReport {
            name: name.to_string(),
            schema: schema.to_string(),
            per_group,
            overall: Overall { mu, sigma },
        }
    }
}

/// What the paired tests pair: fold scores of the single group, or group means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    PerFold,
    PerGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub pairing: Pairing,
    pub n: usize,
    /// Mean of a − b over the paired values.
    pub mean_difference: f64,
    /// `None` when the test is undefined (zero-variance or all-zero differences).
    pub t_p: Option<f64>,
    pub wilcoxon_p: Option<f64>,
}

impl Comparison {
    pub fn between(a: &ModelReport, b: &ModelReport) -> Result<Self> {
        let groups = |m: &ModelReport| m.per_group.iter().map(|g| g.group.clone()).collect::<Vec<_>>();
        if groups(a) != groups(b) {
            return Err(EvalError::Report(format!("{} and {} were evaluated on different groups", a.name, b.name)));
        }
        let (pairing, xa, xb) = if a.per_group.len() == 1 {
            (Pairing::PerFold, a.per_group[0].folds.clone(), b.per_group[0].folds.clone())
        } else {
            (
                Pairing::PerGroup,
                a.per_group.iter().map(|g| g.mu).collect(),
                b.per_group.iter().map(|g| g.mu).collect(),
            )
        };
        if xa.len() != xb.len() {
            return Err(EvalError::Length(xa.len(), xb.len()));
        }
        let n = xa.len();
        let mean_difference = xa.iter().zip(&xb).map(|(x, y)| x - y).sum::<f64>() / n as f64;
        Ok(Comparison {
            a: a.name.clone(),
            b: b.name.clone(),
            pairing,
            n,
            mean_difference,
            t_p: paired_t_test(&xa, &xb).ok().map(|t| t.p),
            wilcoxon_p: wilcoxon_signed_rank(&xa, &xb).ok().map(|w| w.p),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub feature: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub experiment: String,
    pub protocol: String,
    pub models: Vec<ModelReport>,
    pub comparisons: Vec<Comparison>,
    #[serde(default)]
    pub importance: Vec<ImportanceRow>,
}

impl EvalReport {
    pub fn model(&self, name: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn comparison(&self, a: &str, b: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.a == a && c.b == b)
    }

    /// Structural and numeric consistency: scores in [0,1], summaries match
    /// their folds, every model covers the same groups.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EvalError::Report(m));
        if self.models.is_empty() {
            return bad("report has no models".into());
        }
        let groups: Vec<&str> = self.models[0].per_group.iter().map(|g| g.group.as_str()).collect();
        if groups.is_empty() {
            return bad(format!("model {} has no groups", self.models[0].name));
        }
        for m in &self.models {
            if m.per_group.iter().map(|g| g.group.as_str()).collect::<Vec<_>>() != groups {
                return bad(format!("model {} covers different groups", m.name));
            }
            for g in &m.per_group {
                if g.folds.is_empty() {
                    return bad(format!("model {}, group {}: no folds", m.name, g.group));
                }
                if let Some(f) = g.folds.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                    return bad(format!("model {}, group {}: F1 {f} outside [0,1]", m.name, g.group));
                }
                let s = FoldScores {
                    group: g.group.clone(),
                    folds: g.folds.clone(),
                };
                if (s.mu() - g.mu).abs() > SUMMARY_EPS || (s.sigma() - g.sigma).abs() > SUMMARY_EPS {
                    return bad(format!("model {}, group {}: summary does not match folds", m.name, g.group));
                }
            }
            let (mu, sigma) = aggregate(&m.per_group.iter().map(|g| (g.mu, g.sigma)).collect::<Vec<_>>());
            if (mu - m.overall.mu).abs() > SUMMARY_EPS || (sigma - m.overall.sigma).abs() > SUMMARY_EPS {
                return bad(format!("model {}: overall does not match groups", m.name));
            }
        }
        for c in &self.comparisons {
            if self.model(&c.a).is_none() || self.model(&c.b).is_none() {
                return bad(format!("comparison {} vs {} names an unknown model", c.a, c.b));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: EvalReport = serde_json::from_str(text)?;
        r.validate()?;
        Ok(r)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| EvalError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
        EvalReport::from_json(&text)
    }

    /// One row per group with `μ ± σ` per model, then the overall mixture line,
    /// the significance tests and the top of the importance ranking.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if self.models.is_empty() {
            return out;
        }
        let label_width = self.models[0].per_group.iter().map(|g| g.group.len()).max().unwrap_or(0).max(8);
        let col = self.models.iter().map(|m| m.name.len()).max().unwrap_or(0).max(13);
        let _ = writeln!(out, "{} ({})", self.experiment, self.protocol);
        let _ = write!(out, "{:<label_width$}", "group");
        for m in &self.models {
            let _ = write!(out, "  {:>col$}", m.name);
        }
        out.push('\n');
        for (i, g) in self.models[0].per_group.iter().enumerate() {
            let _ = write!(out, "{:<label_width$}", g.group);
            for m in &self.models {
                let r = &m.per_group[i];
                let _ = write!(out, "  {:>col$}", format!("{:.3} ± {:.3}", r.mu, r.sigma));
            }
            out.push('\n');
        }
        if self.models[0].per_group.len() > 1 {
            let _ = write!(out, "{:<label_width$}", "overall");
            for m in &self.models {
                let _ = write!(out, "  {:>col$}", format!("{:.3} ± {:.3}", m.overall.mu, m.overall.sigma));
            }
            out.push('\n');
        }
        let fmt_p = |p: Option<f64>| p.map_or_else(|| "undefined".to_string(), |p| format!("{p:.4}"));
        for c in &self.comparisons {
            let pairing = match c.pairing {
                Pairing::PerFold => "folds",
                Pairing::PerGroup => "groups",
            };
            let _ = writeln!(
                out,
                "{} vs {}: diff {:+.3}, t-test p {}, Wilcoxon p {} (n = {} {pairing})",
                c.a,
                c.b,
                c.mean_difference,
                fmt_p(c.t_p),
                fmt_p(c.wilcoxon_p),
                c.n
            );
        }
        if !self.importance.is_empty() {
            let _ = writeln!(out, "top features:");
            for r in self.importance.iter().take(20) {
                let _ = writeln!(out, "  {:<32} {:.4}", r.feature, r.weight);
            }
        }
        out
    }
}
