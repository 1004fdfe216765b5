use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use repostlab_core::Instance;
use serde::{Deserialize, Serialize};

use crate::build::hashtags_of;
use crate::error::{DatasetError, Result};
use crate::leakage::leakage_filter;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    MixedMc,
    PerhashMc,
    LohoOod,
    Temporal,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::MixedMc, Protocol::PerhashMc, Protocol::LohoOod, Protocol::Temporal];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::MixedMc => "mixed-mc",
            Protocol::PerhashMc => "perhash-mc",
            Protocol::LohoOod => "loho-ood",
            Protocol::Temporal => "temporal",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim())
            .ok_or_else(|| DatasetError::UnknownName {
                kind: "protocol",
                value: s.to_string(),
            })
    }
}

/// One fold: instance ids per part. `group` names the hashtag for per-hashtag,
/// OOD and temporal folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    /// Training instances dropped by the leakage filter.
    #[serde(default)]
    pub leakage_removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub protocol: Protocol,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

impl SplitPlan {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| DatasetError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<SplitPlan> {
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Distinct fold groups in first-appearance order.
    pub fn groups(&self) -> Vec<Option<String>> {
        let mut out: Vec<Option<String>> = Vec::new();
        for f in &self.folds {
            if !out.contains(&f.group) {
                out.push(f.group.clone());
            }
        }
        out
    }

    /// Checks part disjointness, pair disjointness between train and test, id
    /// resolution against `instances`, and the OOD and temporal invariants.
    pub fn validate(&self, instances: &[Instance]) -> Result<()> {
        let by_id: HashMap<&str, &Instance> = instances.iter().map(|i| (i.instance_id.as_str(), i)).collect();
        let bad = |k: usize, msg: String| Err(DatasetError::BadArguments(format!("fold {k}: {msg}")));
        for (k, f) in self.folds.iter().enumerate() {
            let mut seen = HashSet::new();
            for id in f.train.iter().chain(&f.val).chain(&f.test) {
                if !by_id.contains_key(id.as_str()) {
                    return bad(k, format!("unknown instance `{id}`"));
                }
                if !seen.insert(id.as_str()) {
                    return bad(k, format!("instance `{id}` in two parts"));
                }
            }
            let resolve = |ids: &[String]| ids.iter().map(|id| by_id[id.as_str()]).collect::<Vec<_>>();
            let (train, val, test) = (resolve(&f.train), resolve(&f.val), resolve(&f.test));
            let test_pairs: HashSet<_> = test.iter().map(|i| i.pair()).collect();
            if train.iter().any(|i| test_pairs.contains(&i.pair())) {
                return bad(k, "train shares a sender-recipient pair with test".into());
            }
            if self.protocol == Protocol::LohoOod {
                let tags: HashSet<&str> = test.iter().map(|i| i.hashtag.as_str()).collect();
                if train.iter().chain(&val).any(|i| tags.contains(i.hashtag.as_str())) {
                    return bad(k, "test hashtag present in training data".into());
                }
            }
            if self.protocol == Protocol::Temporal {
                let last_train = train.iter().chain(&val).map(|i| i.event_time).max();
                let first_test = test.iter().map(|i| i.event_time).min();
                if let (Some(a), Some(b)) = (last_train, first_test) {
                    if a >= b {
                        return bad(k, "temporal order violated".into());
                    }
                }
            }
        }
        Ok(())
    }
}

fn ids(part: &[&Instance]) -> Vec<String> {
    part.iter().map(|i| i.instance_id.clone()).collect()
}

fn positive_rate(part: &[&Instance]) -> f64 {
    part.iter().filter(|i| i.is_positive()).count() as f64 / part.len().max(1) as f64
}

fn check_fractions(fractions: (f64, f64, f64)) -> Result<()> {
    let (a, b, c) = fractions;
    if [a, b, c].iter().any(|x| !(0.0..=1.0).contains(x)) || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(DatasetError::BadArguments(format!("fractions {a}/{b}/{c} must be in [0, 1] and sum to 1")));
    }
    Ok(())
}

fn mc_folds(subset: &[&Instance], repeats: usize, fractions: (f64, f64, f64), seed_value: u64, stream: &str, group: Option<&str>) -> Result<Vec<Fold>> {
    let n = subset.len();
    let n_test = (fractions.2 * n as f64).round() as usize;
    let n_val = (fractions.1 * n as f64).round() as usize;
    if n_test == 0 || n_val == 0 || n_test + n_val >= n {
        return Err(DatasetError::TooSmall(format!("{n} instances cannot fill train, validation and test")));
    }
    (0..repeats)
        .map(|r| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut seed::rng(seed_value, stream, r as u64));
            let mut test: Vec<usize> = order[..n_test].to_vec();
            let mut val: Vec<usize> = order[n_test..n_test + n_val].to_vec();
            let mut train: Vec<usize> = order[n_test + n_val..].to_vec();
            for part in [&mut test, &mut val, &mut train] {
                part.sort_unstable();
            }
            let pick = |p: &[usize]| p.iter().map(|&i| subset[i]).collect::<Vec<_>>();
            let test = pick(&test);
            let (train, removed) = leakage_filter(pick(&train), &test);
            let val = pick(&val);
            log::debug!(
                "fold {r}: positive rate train {:.3} val {:.3} test {:.3}",
                positive_rate(&train),
                positive_rate(&val),
                positive_rate(&test)
            );
            Ok(Fold {
                group: group.map(str::to_string),
                train: ids(&train),
                val: ids(&val),
                test: ids(&test),
                leakage_removed: removed,
            })
        })
        .collect()
}

/// Uniform (unstratified) Monte Carlo splits over all instances.
pub fn split_monte_carlo(instances: &[Instance], repeats: usize, fractions: (f64, f64, f64), seed_value: u64) -> Result<SplitPlan> {
    check_fractions(fractions)?;
    let all: Vec<&Instance> = instances.iter().collect();
    Ok(SplitPlan {
        protocol: Protocol::MixedMc,
        seed: seed_value,
        folds: mc_folds(&all, repeats, fractions, seed_value, "mixed-mc", None)?,
    })
}

/// Monte Carlo splits within each hashtag, folds grouped by hashtag.
pub fn split_perhash_mc(instances: &[Instance], repeats: usize, fractions: (f64, f64, f64), seed_value: u64) -> Result<SplitPlan> {
    check_fractions(fractions)?;
    let mut folds = Vec::new();
    for (j, h) in hashtags_of(instances).iter().enumerate() {
        let subset: Vec<&Instance> = instances.iter().filter(|i| &i.hashtag == h).collect();
        let s = seed::derive(seed_value, "perhash-mc", j as u64);
        folds.extend(mc_folds(&subset, repeats, fractions, s, "mixed-mc", Some(h))?);
    }
    Ok(SplitPlan {
        protocol: Protocol::PerhashMc,
        seed: seed_value,
        folds,
    })
}

/// Drops every instance whose (sender, recipient) pair occurs under more than one
/// hashtag. Returns the kept instances in input order and the number removed.
pub fn remove_cross_hashtag_pairs(instances: &[Instance]) -> (Vec<&Instance>, usize) {
    let mut tags: HashMap<(&str, &str), HashSet<&str>> = HashMap::new();
    for i in instances {
        tags.entry(i.pair()).or_default().insert(i.hashtag.as_str());
    }
    let kept: Vec<&Instance> = instances.iter().filter(|i| tags[&i.pair()].len() == 1).collect();
    let removed = instances.len() - kept.len();
    (kept, removed)
}

/// Test = every instance of `target`; the others are dealt round-robin into
/// `subsets` shuffled subsets, each serving once as validation.
pub fn split_leave_one_hashtag_out(instances: &[Instance], target: &str, subsets: usize, seed_value: u64) -> Result<SplitPlan> {
    let tags = hashtags_of(instances);
    if tags.len() < 2 {
        return Err(DatasetError::TooSmall(format!("{} hashtag(s); leave-one-out needs at least 2", tags.len())));
    }
    if !tags.iter().any(|t| t == target) {
        return Err(DatasetError::UnknownHashtag(target.to_string()));
    }
    if subsets < 2 {
        return Err(DatasetError::BadArguments(format!("{subsets} subsets; need at least 2")));
    }
    let (clean, removed) = remove_cross_hashtag_pairs(instances);
    if removed > 0 {
        log::info!("removed {removed} instances with sender-recipient pairs spanning hashtags");
    }
    let test: Vec<&Instance> = clean.iter().copied().filter(|i| i.hashtag == target).collect();
    let mut rest: Vec<&Instance> = clean.iter().copied().filter(|i| i.hashtag != target).collect();
    if test.is_empty() || rest.len() < subsets {
        return Err(DatasetError::TooSmall(format!("hashtag `{target}`: {} test and {} other instances", test.len(), rest.len())));
    }
    rest.shuffle(&mut seed::rng(seed_value, "loho", 0));
    let mut parts: Vec<Vec<&Instance>> = vec![Vec::new(); subsets];
    for (k, inst) in rest.into_iter().enumerate() {
        parts[k % subsets].push(inst);
    }
    let folds = (0..subsets)
        .map(|v| {
            let train: Vec<&Instance> = (0..subsets).filter(|&k| k != v).flat_map(|k| parts[k].iter().copied()).collect();
            let (train, leak) = leakage_filter(train, &test);
            Fold {
                group: Some(target.to_string()),
                train: ids(&train),
                val: ids(&parts[v]),
                test: ids(&test),
                leakage_removed: leak,
            }
        })
        .collect();
    Ok(SplitPlan {
        protocol: Protocol::LohoOod,
        seed: seed_value,
        folds,
    })
}

/// Leave-one-hashtag-out for every hashtag in sorted order.
pub fn split_loho_all(instances: &[Instance], subsets: usize, seed_value: u64) -> Result<SplitPlan> {
    let mut folds = Vec::new();
    for (j, h) in hashtags_of(instances).iter().enumerate() {
        let plan = split_leave_one_hashtag_out(instances, h, subsets, seed::derive(seed_value, "loho-target", j as u64))?;
        folds.extend(plan.folds);
    }
    Ok(SplitPlan {
        protocol: Protocol::LohoOod,
        seed: seed_value,
        folds,
    })
}

fn by_time<'a>(mut v: Vec<&'a Instance>) -> Vec<&'a Instance> {
    v.sort_by(|a, b| (a.event_time, &a.instance_id).cmp(&(b.event_time, &b.instance_id)));
    v
}

/// Rolling temporal folds over one hashtag's instances. Window boundaries are
/// positive timestamps giving each window `positives / windows` positives
/// (remainder to the last); positives tied with a window's last one join it,
/// and later windows count from there.
pub fn split_temporal(instances: &[Instance], windows: usize, train_windows: usize, seed_value: u64) -> Result<SplitPlan> {
    if train_windows == 0 || windows <= train_windows {
        return Err(DatasetError::BadArguments(format!("{windows} windows with {train_windows} training windows")));
    }
    let tags = hashtags_of(instances);
    if tags.len() > 1 {
        return Err(DatasetError::BadArguments(format!("temporal split expects one hashtag, got {}", tags.len())));
    }
    let group = tags.into_iter().next();
    let all = by_time(instances.iter().collect());
    let positives: Vec<i64> = all.iter().filter(|i| i.is_positive()).map(|i| i.event_time).collect();
    if positives.len() < windows {
        return Err(DatasetError::TooSmall(format!("{} positives for {windows} windows", positives.len())));
    }
    let per = positives.len() / windows;
    let mut bounds = Vec::with_capacity(windows - 1);
    let mut end = 0;
    for _ in 1..windows {
        end = (end + per).min(positives.len());
        let b = positives[end - 1];
        while end < positives.len() && positives[end] == b {
            end += 1;
        }
        bounds.push(b);
    }
    let mut assigned: Vec<Vec<&Instance>> = vec![Vec::new(); windows];
    for inst in all {
        let w = bounds.partition_point(|&b| b < inst.event_time);
        assigned[w].push(inst);
    }
    let folds = (0..windows - train_windows)
        .map(|f| {
            let test: Vec<&Instance> = assigned[f + train_windows].clone();
            let train: Vec<&Instance> = assigned[f..f + train_windows].iter().flatten().copied().collect();
            let (train, leak) = leakage_filter(train, &test);
            let train = by_time(train);
            let n_val = (0.1 * train.len() as f64).round() as usize;
            let (fit, val) = train.split_at(train.len() - n_val);
            Fold {
                group: group.clone(),
                train: ids(fit),
                val: ids(val),
                test: ids(&test),
                leakage_removed: leak,
            }
        })
        .collect();
    Ok(SplitPlan {
        protocol: Protocol::Temporal,
        seed: seed_value,
        folds,
    })
}

/// Temporal folds for each hashtag in sorted order.
pub fn split_temporal_all(instances: &[Instance], windows: usize, train_windows: usize, seed_value: u64) -> Result<SplitPlan> {
    let mut folds = Vec::new();
    for h in hashtags_of(instances) {
        let subset: Vec<Instance> = instances.iter().filter(|i| i.hashtag == h).cloned().collect();
        let plan = split_temporal(&subset, windows, train_windows, seed_value).map_err(|e| match e {
            DatasetError::TooSmall(m) => DatasetError::TooSmall(format!("hashtag `{h}`: {m}")),
            other => other,
        })?;
        folds.extend(plan.folds);
    }
    Ok(SplitPlan {
        protocol: Protocol::Temporal,
        seed: seed_value,
        folds,
    })
}
