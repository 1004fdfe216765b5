use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SynthError};

/// Coefficients of the repost logit. The α terms describe the pair of users,
/// the β terms the post.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BehaviorWeights {
    pub alpha_follow: f64,
    pub alpha_interact: f64,
    /// Multiplies the recipient's activity trait, centred to mean 0.
    pub alpha_activity: f64,
    /// Multiplies the recipient's interest in the post's hashtag, scaled so a
    /// uniform interest gives 1, then centred.
    pub beta_topic: f64,
    /// Multiplies the post valence in {-1, 0, 1} times the hashtag polarity.
    pub beta_sentiment: f64,
    /// Logit intercept.
    pub base: f64,
}

impl Default for BehaviorWeights {
    fn default() -> Self {
        BehaviorWeights {
            alpha_follow: 3.0,
            alpha_interact: 2.0,
            alpha_activity: 1.0,
            beta_topic: 0.5,
            beta_sentiment: 0.0,
            base: -4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    pub n_users: usize,
    pub n_hashtags: usize,
    /// Hashtag names; generated as `topic0`, `topic1`, ... when empty.
    pub hashtags: Vec<String>,
    /// Original posts per hashtag in `posts.jsonl`.
    pub posts_per_hashtag: usize,
    /// Upper bound on historical posts per user (at most 50).
    pub history_length: usize,
    /// Accounts each newcomer follows in the preferential-attachment graph.
    pub attachment: usize,
    /// Topic tokens per hashtag.
    pub vocab_size: usize,
    /// Explicit topic vocabularies, one per hashtag; generated when empty.
    pub vocabularies: Vec<Vec<String>>,
    /// Require pairwise-disjoint topic vocabularies.
    pub ood_strict: bool,
    /// Fraction of each generated vocabulary drawn from a shared pool when not strict.
    pub vocab_overlap: f64,
    /// Dirichlet concentration of user interests over hashtags.
    pub interest_concentration: f64,
    pub weights: BehaviorWeights,
    /// Sign of the sentiment effect per hashtag; +1 for every hashtag when empty.
    pub hashtag_polarity: Vec<f64>,
    /// Exponent on activity when drawing batch authors; larger values concentrate authorship.
    pub author_exponent: f64,
    /// Probability that a given non-follower is exposed to a post.
    pub non_follower_exposure: f64,
    /// Seconds since epoch at which the post batch starts.
    pub start_time: i64,
    /// Days spanned by the post batch.
    pub span_days: f64,
    /// Days before `start_time` spanned by histories.
    pub history_days: f64,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            n_users: 500,
            n_hashtags: 4,
            hashtags: Vec::new(),
            posts_per_hashtag: 60,
            history_length: 20,
            attachment: 5,
            vocab_size: 40,
            vocabularies: Vec::new(),
            ood_strict: true,
            vocab_overlap: 0.0,
            interest_concentration: 0.5,
            weights: BehaviorWeights::default(),
            hashtag_polarity: Vec::new(),
            author_exponent: 1.0,
            non_follower_exposure: 0.01,
            start_time: 1_600_000_000,
            span_days: 20.0,
            history_days: 60.0,
            seed: 0,
        }
    }
}

impl WorldConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: WorldConfig = toml::from_str(text).map_err(|e| SynthError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SynthError::ConfigFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        WorldConfig::from_toml(&text).map_err(|e| SynthError::ConfigFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("world config serializes")
    }

    pub fn polarity(&self, h: usize) -> f64 {
        self.hashtag_polarity.get(h).copied().unwrap_or(1.0)
    }

    pub fn hashtag_names(&self) -> Vec<String> {
        if self.hashtags.is_empty() {
            (0..self.n_hashtags).map(|j| format!("topic{j}")).collect()
        } else {
            self.hashtags.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(SynthError::Config(m));
        if self.n_users == 0 {
            return fail("n_users must be at least 1".into());
        }
        if self.n_hashtags == 0 {
            return fail("n_hashtags must be at least 1".into());
        }
        if !(self.author_exponent.is_finite() && self.author_exponent >= 0.0) {
            return fail("author_exponent must be finite and non-negative".into());
        }
        if !self.hashtag_polarity.is_empty() && self.hashtag_polarity.len() != self.n_hashtags {
            return fail(format!("{} polarities for n_hashtags = {}", self.hashtag_polarity.len(), self.n_hashtags));
        }
        if self.hashtag_polarity.iter().any(|p| !p.is_finite()) {
            return fail("hashtag polarities must be finite".into());
        }
        if !self.hashtags.is_empty() {
            if self.hashtags.len() != self.n_hashtags {
                return fail(format!("{} hashtag names for n_hashtags = {}", self.hashtags.len(), self.n_hashtags));
            }
            let mut seen = std::collections::HashSet::new();
            for h in &self.hashtags {
                if h.is_empty() || h.chars().any(|c| !(c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')) {
                    return fail(format!("hashtag {h:?} must be non-empty lowercase ascii"));
                }
                if !seen.insert(h) {
                    return fail(format!("hashtag {h} listed twice"));
                }
            }
        }
        if self.history_length > repostlab_core::MAX_HISTORY {
            return fail(format!(
                "history_length {} exceeds the {} posts a user record can hold",
                self.history_length,
                repostlab_core::MAX_HISTORY
            ));
        }
        if self.attachment == 0 {
            return fail("attachment must be at least 1".into());
        }
        if self.vocabularies.is_empty() && self.vocab_size == 0 {
            return fail("vocab_size must be at least 1".into());
        }
        if !self.vocabularies.is_empty() {
            if self.vocabularies.len() != self.n_hashtags {
                return fail(format!("{} vocabularies for n_hashtags = {}", self.vocabularies.len(), self.n_hashtags));
            }
            if self.vocabularies.iter().any(Vec::is_empty) {
                return fail("every vocabulary needs at least one token".into());
            }
            if self.ood_strict {
                let mut owner = std::collections::HashMap::new();
                for (j, v) in self.vocabularies.iter().enumerate() {
                    for t in v {
                        if let Some(k) = owner.insert(t.as_str(), j) {
                            if k != j {
                                return fail(format!("token {t:?} appears in vocabularies {k} and {j}"));
                            }
                        }
                    }
                }
            }
        }
        if self.ood_strict && self.vocab_overlap != 0.0 {
            return fail("vocab_overlap must be 0 when ood_strict is set".into());
        }
        let w = &self.weights;
        let reals = [
            ("alpha_follow", w.alpha_follow),
            ("alpha_interact", w.alpha_interact),
            ("alpha_activity", w.alpha_activity),
            ("beta_topic", w.beta_topic),
            ("beta_sentiment", w.beta_sentiment),
            ("base", w.base),
            ("span_days", self.span_days),
            ("history_days", self.history_days),
            ("interest_concentration", self.interest_concentration),
        ];
        if let Some((name, v)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return fail(format!("{name} = {v} is not finite"));
        }
        for (name, v) in [("non_follower_exposure", self.non_follower_exposure), ("vocab_overlap", self.vocab_overlap)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} = {v} outside [0,1]"));
            }
        }
        if self.span_days <= 0.0 || self.history_days <= 0.0 || self.interest_concentration <= 0.0 {
            return fail("span_days, history_days and interest_concentration must be positive".into());
        }
        if self.start_time <= (self.history_days * 86_400.0) as i64 {
            return fail("start_time leaves no room for histories before it".into());
        }
        Ok(())
    }
}
