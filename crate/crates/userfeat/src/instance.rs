//! Assembly of the 303-value ALL vector for an instance.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use repostlab_core::dictionary::m_index::{HASHTAG, TOPIC_LDA};
use repostlab_core::dictionary::{ALL_LEN, M_LEN};
use repostlab_core::{Corpus, FeatureTable, Instance, RawPost, SchemaId};
use repostlab_textfeat::{fnv1a, PostFeaturizer};
use serde::{Deserialize, Serialize};

use crate::error::{Result, UserError};
use crate::graph::{leaderrank, FollowGraph};
use crate::history::{HistorySummary, LDA_TOPICS};
use crate::interaction::{historical_post_features, interaction_features};
use crate::profile::{profile_features, ProfileContext};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturizerConfig {
    /// Reference date for account age; `None` means the corpus max timestamp.
    pub reference_date: Option<i64>,
    /// Truncate histories at the instance's event time.
    pub strict_causality: bool,
}

const TEXT_WIDTH: usize = HASHTAG;
const CACHE_MAGIC: &[u8; 8] = b"RLMCACH1";

/// Text-only M features (everything but the hashtag code) keyed by text hash.
/// The fingerprint ties a cache to the topic model and lexicons it was built with.
#[derive(Debug, Default)]
pub struct TextFeatureCache {
    fingerprint: u64,
    map: Mutex<HashMap<u64, Arc<Vec<f64>>>>,
}

impl TextFeatureCache {
    pub fn new(fingerprint: u64) -> Self {
        TextFeatureCache {
            fingerprint,
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_compute(&self, text: &str, compute: impl FnOnce() -> Vec<f64>) -> Arc<Vec<f64>> {
        let key = fnv1a(text.as_bytes());
        if let Some(v) = self.map.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = Arc::new(compute());
        self.map.lock().expect("cache lock").insert(key, v.clone());
        v
    }

    /// Loads a cache file; a missing file or a different fingerprint yields an empty cache.
    pub fn load(path: &Path, fingerprint: u64) -> Result<Self> {
        let cache = TextFeatureCache::new(fingerprint);
        let Ok(mut f) = std::fs::File::open(path) else {
            return Ok(cache);
        };
        let mut bytes = Vec::new();
        f.read_to_end(&mut bytes).map_err(|e| UserError::Cache(e.to_string()))?;
        if bytes.len() < 24 || &bytes[..8] != CACHE_MAGIC {
            return Err(UserError::Cache(format!("{} is not a feature cache", path.display())));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        if word(8) != fingerprint {
            log::info!("feature cache {} built for another model; ignoring it", path.display());
            return Ok(cache);
        }
        let n = word(16) as usize;
        let rec = 8 * (1 + TEXT_WIDTH);
        if bytes.len() != 24 + n * rec {
            return Err(UserError::Cache(format!("{} is truncated", path.display())));
        }
        let mut map = cache.map.lock().expect("cache lock");
        for r in 0..n {
            let base = 24 + r * rec;
            let values = (0..TEXT_WIDTH).map(|j| f64::from_bits(word(base + 8 + 8 * j))).collect();
            map.insert(word(base), Arc::new(values));
        }
        drop(map);
        Ok(cache)
    }

    /// Writes entries sorted by key, so equal caches produce equal files.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.map.lock().expect("cache lock");
        let mut keys: Vec<&u64> = map.keys().collect();
        keys.sort();
        let mut out = Vec::with_capacity(24 + keys.len() * 8 * (1 + TEXT_WIDTH));
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&self.fingerprint.to_le_bytes());
        out.extend_from_slice(&(keys.len() as u64).to_le_bytes());
        for k in keys {
            out.extend_from_slice(&k.to_le_bytes());
            for v in map[k].iter() {
                out.extend_from_slice(&v.to_bits().to_le_bytes());
            }
        }
        let mut f = std::fs::File::create(path).map_err(|e| UserError::Cache(e.to_string()))?;
        f.write_all(&out).map_err(|e| UserError::Cache(e.to_string()))
    }
}

/// Builds ALL vectors for instances of one corpus. Graph-level quantities are
/// computed once; post features and history summaries are memoized.
pub struct InstanceFeaturizer<'a> {
    corpus: &'a Corpus,
    posts: &'a PostFeaturizer,
    cfg: FeaturizerConfig,
    graph: FollowGraph,
    leaderrank: Vec<f64>,
    indegree: Vec<usize>,
    reference_date: i64,
    max_post_count: u64,
    cache: Arc<TextFeatureCache>,
    summaries: Mutex<HashMap<(String, usize), Arc<HistorySummary>>>,
}

impl<'a> InstanceFeaturizer<'a> {
    pub fn new(corpus: &'a Corpus, posts: &'a PostFeaturizer, cfg: FeaturizerConfig) -> Result<Self> {
        InstanceFeaturizer::with_cache(corpus, posts, cfg, Arc::new(TextFeatureCache::default()))
    }

    pub fn with_cache(corpus: &'a Corpus, posts: &'a PostFeaturizer, cfg: FeaturizerConfig, cache: Arc<TextFeatureCache>) -> Result<Self> {
        let graph = FollowGraph::from_corpus(corpus);
        let leaderrank = leaderrank(&graph)?;
        let indegree = interacting_followers(corpus, &graph);
        Ok(InstanceFeaturizer {
            corpus,
            posts,
            cfg,
            leaderrank,
            indegree,
            graph,
            reference_date: cfg.reference_date.unwrap_or_else(|| corpus.max_timestamp()),
            max_post_count: corpus.users().iter().map(|u| u.total_post_count).max().unwrap_or(0),
            cache,
            summaries: Mutex::new(HashMap::new()),
        })
    }

    pub fn graph(&self) -> &FollowGraph {
        &self.graph
    }

    pub fn leaderrank_scores(&self) -> &[f64] {
        &self.leaderrank
    }

    pub fn cache(&self) -> &Arc<TextFeatureCache> {
        &self.cache
    }

    /// M vector of `post`; the hashtag code uses `study_hashtag` when given.
    pub fn post_vector(&self, post: &RawPost, study_hashtag: Option<&str>) -> Vec<f64> {
        let text = self.cache.get_or_compute(&post.text, || self.posts.text_features(&post.text));
        let mut v = Vec::with_capacity(M_LEN);
        v.extend_from_slice(&text);
        v.push(self.posts.hashtag_code(post, study_hashtag) as f64);
        v
    }

    pub fn summary(&self, user_id: &str, cutoff: Option<i64>) -> Result<Arc<HistorySummary>> {
        let user = self.corpus.user(user_id).ok_or_else(|| UserError::UnknownUser(user_id.to_string()))?;
        let history = match cutoff {
            Some(t) => user.history_until(t),
            None => &user.history[..],
        };
        let key = (user_id.to_string(), history.len());
        if let Some(s) = self.summaries.lock().expect("summary lock").get(&key) {
            return Ok(s.clone());
        }
        let post_m = history.iter().map(|p| self.post_vector(p, None)).collect();
        let summary = Arc::new(HistorySummary::build(user_id, history, post_m, |pid| {
            self.corpus.any_post(pid).map(|p| p.author_id.clone())
        }));
        self.summaries.lock().expect("summary lock").insert(key, summary.clone());
        Ok(summary)
    }

    pub fn features(&self, inst: &Instance) -> Result<Vec<f64>> {
        let post = self
            .corpus
            .any_post(&inst.post_id)
            .ok_or_else(|| UserError::UnknownPost(inst.post_id.clone()))?;
        let recipient = self
            .corpus
            .user(&inst.recipient_id)
            .ok_or_else(|| UserError::UnknownUser(inst.recipient_id.clone()))?;
        let sender = self
            .corpus
            .user(&inst.sender_id)
            .ok_or_else(|| UserError::UnknownUser(inst.sender_id.clone()))?;
        let cutoff = self.cfg.strict_causality.then_some(inst.event_time);
        let rs = self.summary(&inst.recipient_id, cutoff)?;
        let ss = self.summary(&inst.sender_id, cutoff)?;

        let mut v = Vec::with_capacity(ALL_LEN);
        v.extend(self.post_vector(post, Some(&inst.hashtag)));
        let ctx = ProfileContext {
            graph: &self.graph,
            leaderrank: &self.leaderrank,
            indegree: &self.indegree,
            reference_date: self.reference_date,
            max_post_count: self.max_post_count,
        };
        v.extend(profile_features(recipient, &sender.user_id, &ctx));
        v.extend(profile_features(sender, &recipient.user_id, &ctx));
        v.extend(rs.activity);
        v.extend(rs.popularity);
        v.extend(ss.activity);
        v.extend(ss.popularity);
        let post_lda = v[TOPIC_LDA..TOPIC_LDA + LDA_TOPICS].to_vec();
        v.extend(interaction_features(&ss, &rs, inst, &post_lda));
        v.extend(historical_post_features(&ss, &rs));
        debug_assert_eq!(v.len(), ALL_LEN);
        Ok(v)
    }

    /// Feature table of `instances` in input order.
    pub fn featurize_all(&self, instances: &[Instance]) -> Result<FeatureTable> {
        let rows: Vec<Vec<f64>> = instances.par_iter().map(|i| self.features(i)).collect::<Result<_>>()?;
        let mut table = FeatureTable::with_schema(SchemaId::All);
        for (inst, row) in instances.iter().zip(rows) {
            table.push(row, inst.label, &inst.hashtag, &inst.instance_id)?;
        }
        Ok(table)
    }
}

/// For each user R: followers of R that R mentioned in its history or that shared
/// a post of R's history.
fn interacting_followers(corpus: &Corpus, graph: &FollowGraph) -> Vec<usize> {
    let mut sharers: HashMap<&str, HashSet<&str>> = HashMap::new();
    let all_posts = corpus.posts().iter().chain(corpus.users().iter().flat_map(|u| u.history.iter()));
    for p in all_posts {
        if let Some(parent) = p.parent_id.as_deref() {
            sharers.entry(parent).or_default().insert(p.author_id.as_str());
        }
    }
    (0..graph.len())
        .map(|r| {
            let Some(user) = corpus.user(graph.id(r)) else {
                return 0;
            };
            let mut engaged: HashSet<&str> = user.history.iter().flat_map(|p| p.mentions.iter().map(String::as_str)).collect();
            for p in &user.history {
                if let Some(s) = sharers.get(p.post_id.as_str()) {
                    engaged.extend(s.iter().copied());
                }
            }
            graph.followers(r).iter().filter(|&&f| engaged.contains(graph.id(f))).count()
        })
        .collect()
}
