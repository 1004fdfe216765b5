use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use repostlab_core::{feature_dictionary, Corpus, Instance, RawPost, RepostEvent, SchemaId};
use serde::{Deserialize, Serialize};

use crate::error::{DatasetError, Result};
use crate::pool::NegativeIndex;
use crate::positives::{enumerate_positives, PositiveReport};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RatioTag {
    #[serde(rename = "1:1")]
    OneToOne,
    #[serde(rename = "1:5")]
    OneToFive,
    #[serde(rename = "1:10")]
    OneToTen,
    #[serde(rename = "general-1:5")]
    General,
}

impl RatioTag {
    pub const ALL: [RatioTag; 4] = [RatioTag::OneToOne, RatioTag::OneToFive, RatioTag::OneToTen, RatioTag::General];

    pub fn as_str(self) -> &'static str {
        match self {
            RatioTag::OneToOne => "1:1",
            RatioTag::OneToFive => "1:5",
            RatioTag::OneToTen => "1:10",
            RatioTag::General => "general-1:5",
        }
    }

    /// Nearest same-hashtag negatives per positive.
    pub fn nearest(self) -> usize {
        match self {
            RatioTag::OneToOne => 1,
            RatioTag::OneToFive | RatioTag::OneToTen => 5,
            RatioTag::General => 0,
        }
    }

    /// Random negatives per positive.
    pub fn random(self) -> usize {
        match self {
            RatioTag::OneToTen | RatioTag::General => 5,
            _ => 0,
        }
    }

    pub fn negatives(self) -> usize {
        self.nearest() + self.random()
    }
}

impl fmt::Display for RatioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RatioTag {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self> {
        RatioTag::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| DatasetError::UnknownName {
                kind: "ratio",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub positives: PositiveReport,
    /// Positives dropped because their same-hashtag pool was smaller than required.
    pub excluded_small_pool: usize,
    /// Positives dropped because too few random negatives were available.
    pub excluded_random_deficit: usize,
    pub kept_positives: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub ratio: RatioTag,
    pub seed: u64,
    pub instances: Vec<Instance>,
    pub report: DatasetReport,
}

impl LabeledDataset {
    pub fn hashtags(&self) -> Vec<String> {
        hashtags_of(&self.instances)
    }

    pub fn positive_count(&self) -> usize {
        self.instances.iter().filter(|i| i.is_positive()).count()
    }
}

pub fn hashtags_of(instances: &[Instance]) -> Vec<String> {
    let mut h: Vec<String> = instances.iter().map(|i| i.hashtag.clone()).collect::<HashSet<_>>().into_iter().collect();
    h.sort();
    h
}

fn ranking_columns() -> &'static [usize] {
    static COLS: OnceLock<Vec<usize>> = OnceLock::new();
    COLS.get_or_init(|| {
        feature_dictionary(SchemaId::All)
            .iter()
            .enumerate()
            .filter(|(_, n)| n.starts_with("M_") || n.starts_with("U-P_S_") || n.starts_with("U-HA_S_") || n.starts_with("U-HM_S_"))
            .map(|(i, _)| i)
            .collect()
    })
}

/// Post and sender-side columns of an ALL vector: M ∥ sender U-P ∥ sender U-HA ∥ sender U-HM.
pub fn ranking_vector(all: &[f64]) -> Vec<f64> {
    ranking_columns().iter().map(|&i| all[i]).collect()
}

/// Cosine distance with NaN read as 0; 1 when either vector is zero.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let z = |x: f64| if x.is_nan() { 0.0 } else { x };
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (z(*x), z(*y));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    1.0 - dot / (na.sqrt() * nb.sqrt())
}

/// Indices of the `n` candidates nearest to `positive`, by ascending cosine
/// distance with ties broken by post id.
pub fn select_negatives(positive: &[f64], candidates: &[(&RawPost, Vec<f64>)], n: usize) -> Vec<usize> {
    let mut order: Vec<(f64, &str, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(i, (p, v))| (cosine_distance(positive, v), p.post_id.as_str(), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    order.into_iter().take(n).map(|(_, _, i)| i).collect()
}

fn positive_instance(e: &RepostEvent) -> Instance {
    Instance {
        instance_id: String::new(),
        post_id: e.original_id.clone(),
        sender_id: e.sender_id.clone(),
        recipient_id: e.recipient_id.clone(),
        event_time: e.repost_time,
        post_created_at: e.original_created_at,
        hashtag: e.hashtag.clone(),
        label: 1,
        group: None,
    }
}

fn negative_instance(post: &RawPost, recipient: &str, event_time: i64, hashtag: &str) -> Instance {
    Instance {
        instance_id: String::new(),
        post_id: post.post_id.clone(),
        sender_id: post.author_id.clone(),
        recipient_id: recipient.to_string(),
        event_time,
        post_created_at: post.created_at,
        hashtag: hashtag.to_string(),
        label: 0,
        group: None,
    }
}

enum Outcome {
    Kept(Vec<Instance>),
    SmallPool,
    RandomDeficit,
}

const RANDOM_ATTEMPTS_PER_DRAW: usize = 1_000;

fn similarity_group<F, E>(index: &NegativeIndex<'_>, e: &RepostEvent, i: usize, ratio: RatioTag, seed_value: u64, feature_fn: &F) -> Result<Outcome>
where
    F: Fn(&Instance) -> std::result::Result<Vec<f64>, E> + Sync,
    E: fmt::Display,
{
    let pool = index.negative_pool(e);
    let need = ratio.nearest();
    if pool.len() < need {
        return Ok(Outcome::SmallPool);
    }
    let pos = positive_instance(e);
    let feat = |inst: &Instance| {
        feature_fn(inst).map_err(|err| DatasetError::Feature {
            instance: format!("{}→{}", inst.post_id, inst.recipient_id),
            message: err.to_string(),
        })
    };
    let pos_vec = feat(&pos)?;
    let candidates: Vec<(&RawPost, Vec<f64>)> = pool
        .iter()
        .map(|p| Ok((*p, feat(&negative_instance(p, &e.recipient_id, e.repost_time, &e.hashtag))?)))
        .collect::<Result<_>>()?;
    let chosen = select_negatives(&pos_vec, &candidates, need);
    let mut group = vec![pos];
    let mut used: HashSet<&str> = HashSet::new();
    for c in chosen {
        used.insert(candidates[c].0.post_id.as_str());
        group.push(negative_instance(candidates[c].0, &e.recipient_id, e.repost_time, &e.hashtag));
    }

    let extra = ratio.random();
    if extra > 0 {
        let posts = index.corpus().posts();
        let universe = index.originals_before(e.repost_time);
        let mut rng = seed::rng(seed_value, "random-negatives", i as u64);
        let mut attempts = 0;
        let mut taken = 0;
        while taken < extra {
            if universe.is_empty() || attempts >= RANDOM_ATTEMPTS_PER_DRAW * extra {
                return Ok(Outcome::RandomDeficit);
            }
            attempts += 1;
            let p = &posts[universe[rng.random_range(0..universe.len())]];
            if used.contains(p.post_id.as_str()) || !index.eligible(p, &e.recipient_id, &e.original_id) {
                continue;
            }
            used.insert(p.post_id.as_str());
            let tag = p.hashtags.first().map_or(e.hashtag.as_str(), String::as_str);
            group.push(negative_instance(p, &e.recipient_id, e.repost_time, tag));
            taken += 1;
        }
    }
    Ok(Outcome::Kept(group))
}

/// Builds the labeled dataset for `ratio`. `feature_fn` maps an instance to the
/// vector used for nearest-negative ranking (see [`ranking_vector`]); it is not
/// called for the general scheme.
pub fn build_dataset<F, E>(corpus: &Corpus, ratio: RatioTag, seed_value: u64, feature_fn: F) -> Result<LabeledDataset>
where
    F: Fn(&Instance) -> std::result::Result<Vec<f64>, E> + Sync,
    E: fmt::Display,
{
    let (events, positives) = enumerate_positives(corpus);
    let index = NegativeIndex::new(corpus);
    let mut report = DatasetReport {
        positives,
        ..Default::default()
    };
    let groups: Vec<Vec<Instance>> = if ratio == RatioTag::General {
        let negatives = general_negatives(&index, &events, ratio.random(), seed_value)?;
        let mut groups: Vec<Vec<Instance>> = events.iter().map(|e| vec![positive_instance(e)]).collect();
        for n in negatives {
            let g = n.group.expect("general negatives carry their positive index");
            groups[g].push(n);
        }
        groups
    } else {
        let outcomes: Vec<Outcome> = events
            .par_iter()
            .enumerate()
            .map(|(i, e)| similarity_group(&index, e, i, ratio, seed_value, &feature_fn))
            .collect::<Result<_>>()?;
        let mut groups = Vec::new();
        for o in outcomes {
            match o {
                Outcome::Kept(g) => groups.push(g),
                Outcome::SmallPool => report.excluded_small_pool += 1,
                Outcome::RandomDeficit => report.excluded_random_deficit += 1,
            }
        }
        groups
    };
    if report.excluded_small_pool + report.excluded_random_deficit > 0 {
        log::warn!(
            "{ratio}: excluded {} positives with too small a pool and {} with too few random negatives",
            report.excluded_small_pool,
            report.excluded_random_deficit
        );
    }
    let mut instances = Vec::new();
    for (g, group) in groups.into_iter().enumerate() {
        for mut inst in group {
            inst.group = Some(g);
            inst.instance_id = format!("i{:07}", instances.len());
            instances.push(inst);
        }
    }
    report.kept_positives = instances.iter().filter(|i| i.is_positive()).count();
    report.negatives = instances.len() - report.kept_positives;
    Ok(LabeledDataset {
        ratio,
        seed: seed_value,
        instances,
        report,
    })
}

/// Random (post, user-activity) pairs: the user acted strictly after the post was
/// created, is not its author, and never reposted it. `k` pairs per positive,
/// returned with `group` set to the positive's index.
pub fn general_negatives(index: &NegativeIndex<'_>, positives: &[RepostEvent], k: usize, seed_value: u64) -> Result<Vec<Instance>> {
    let corpus = index.corpus();
    let posts = corpus.posts();
    let originals: Vec<&RawPost> = posts.iter().filter(|p| !p.is_share()).collect();
    let mut activity: Vec<(i64, &str)> = posts.iter().map(|p| (p.created_at, p.author_id.as_str())).collect();
    activity.sort_unstable();
    let wanted = k * positives.len();
    if wanted > 0 && (originals.is_empty() || activity.is_empty()) {
        return Err(DatasetError::SamplingExhausted { draws: 0, found: 0, wanted });
    }
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut out = Vec::with_capacity(wanted);
    for (g, e) in positives.iter().enumerate() {
        let mut rng = seed::rng(seed_value, "general", g as u64);
        let budget = 10_000 * k;
        let mut draws = 0;
        let mut found = 0;
        while found < k {
            if draws >= budget {
                return Err(DatasetError::SamplingExhausted { draws, found: out.len(), wanted });
            }
            draws += 1;
            let p = originals[rng.random_range(0..originals.len())];
            let (t_u, u) = activity[rng.random_range(0..activity.len())];
            if t_u <= p.created_at || u == p.author_id || index.has_reposted(u, &p.post_id) || !seen.insert((p.post_id.as_str(), u)) {
                continue;
            }
            let tag = p.hashtags.first().map_or(e.hashtag.as_str(), String::as_str);
            let mut inst = negative_instance(p, u, t_u, tag);
            inst.group = Some(g);
            out.push(inst);
            found += 1;
        }
    }
    Ok(out)
}

/// Rebuilds positives and their pools, for callers that only need the raw events.
pub fn positives_with_pools(corpus: &Corpus) -> Vec<(RepostEvent, usize)> {
    let (events, _) = enumerate_positives(corpus);
    let index = NegativeIndex::new(corpus);
    events
        .into_iter()
        .map(|e| {
            let n = index.negative_pool(&e).len();
            (e, n)
        })
        .collect()
}
