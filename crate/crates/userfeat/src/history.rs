//! Per-user aggregates over the latest-50-post history.

use std::collections::HashMap;

use repostlab_core::dictionary::m_index::TOPIC_LDA;
use repostlab_core::dictionary::M_LEN;
use repostlab_core::{PostType, RawPost, SECS_PER_DAY};

pub const LDA_TOPICS: usize = 10;

/// `(TweetNum, TweetPercent, RetweetPercent, QuotePercent, ReplyPercent,
/// InteractivePer, AverageInterval)`. Percentages are on a 0..100 scale and the
/// interval is in days. Everything but the size is NaN for an empty history; the
/// interval is also NaN for a single post.
pub fn activity_features(history: &[RawPost]) -> [f64; 7] {
    let n = history.len();
    if n == 0 {
        return [0.0, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN];
    }
    let mut counts = [0usize; 4];
    for p in history {
        counts[p.post_type.index()] += 1;
    }
    let pct = |c: usize| 100.0 * c as f64 / n as f64;
    let interactive = pct(n - counts[PostType::Original.index()]);
    let interval = if n < 2 {
        f64::NAN
    } else {
        let first = history.iter().map(|p| p.created_at).min().unwrap_or(0);
        let last = history.iter().map(|p| p.created_at).max().unwrap_or(0);
        (last - first) as f64 / SECS_PER_DAY / (n - 1) as f64
    };
    [
        n as f64,
        pct(counts[0]),
        pct(counts[1]),
        pct(counts[2]),
        pct(counts[3]),
        interactive,
        interval,
    ]
}

/// Mean received `(reposts, quotes, replies, likes)` per history post; NaN when empty.
pub fn popularity_features(history: &[RawPost]) -> [f64; 4] {
    if history.is_empty() {
        return [f64::NAN; 4];
    }
    let n = history.len() as f64;
    let mut sums = [0.0; 4];
    for p in history {
        sums[0] += p.metrics.reposts as f64;
        sums[1] += p.metrics.quotes as f64;
        sums[2] += p.metrics.replies as f64;
        sums[3] += p.metrics.likes as f64;
    }
    sums.map(|s| s / n)
}

/// Mean of each column over the rows where it is not NaN; NaN when no row has a value.
pub fn nan_mean(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    (0..width)
        .map(|j| {
            let (sum, count) = rows
                .iter()
                .map(|r| r[j])
                .filter(|x| !x.is_nan())
                .fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
            if count == 0 {
                f64::NAN
            } else {
                sum / count as f64
            }
        })
        .collect()
}

/// Immutable aggregates of one user's history, optionally truncated at a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySummary {
    pub user_id: String,
    pub activity: [f64; 7],
    pub popularity: [f64; 4],
    /// Number of history posts mentioning each user.
    pub mention_posts: HashMap<String, usize>,
    /// Author of the shared parent for each history post (None for originals or
    /// unresolvable parents).
    pub parent_authors: Vec<Option<String>>,
    pub mentions: Vec<Vec<String>>,
    pub post_m: Vec<Vec<f64>>,
    /// NaN-aware mean of `post_m`; all NaN for an empty history.
    pub mean_m: Vec<f64>,
    pub mean_lda: Vec<f64>,
}

impl HistorySummary {
    pub fn build(
        user_id: &str,
        history: &[RawPost],
        post_m: Vec<Vec<f64>>,
        parent_author: impl Fn(&str) -> Option<String>,
    ) -> HistorySummary {
        assert_eq!(history.len(), post_m.len());
        let mut mention_posts: HashMap<String, usize> = HashMap::new();
        for p in history {
            let mut seen: Vec<&String> = p.mentions.iter().collect();
            seen.sort();
            seen.dedup();
            for m in seen {
                *mention_posts.entry(m.clone()).or_default() += 1;
            }
        }
        let mean_m = nan_mean(&post_m, M_LEN);
        let mean_lda = mean_m[TOPIC_LDA..TOPIC_LDA + LDA_TOPICS].to_vec();
        HistorySummary {
            user_id: user_id.to_string(),
            activity: activity_features(history),
            popularity: popularity_features(history),
            mention_posts,
            parent_authors: history
                .iter()
                .map(|p| p.parent_id.as_deref().and_then(&parent_author))
                .collect(),
            mentions: history.iter().map(|p| p.mentions.clone()).collect(),
            post_m,
            mean_m,
            mean_lda,
        }
    }

    pub fn len(&self) -> usize {
        self.post_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.post_m.is_empty()
    }

    /// Indices of history posts that mention `other` or share a post authored by `other`.
    pub fn interaction_posts(&self, other: &str) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                self.mentions[i].iter().any(|m| m == other) || self.parent_authors[i].as_deref() == Some(other)
            })
            .collect()
    }

    pub fn lda_of(&self, i: usize) -> &[f64] {
        &self.post_m[i][TOPIC_LDA..TOPIC_LDA + LDA_TOPICS]
    }
}
