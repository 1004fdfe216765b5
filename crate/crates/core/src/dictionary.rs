//! The ordered feature dictionary.
//!
//! `ALL` is the concatenation `M ∥ U-P ∥ U-HA ∥ U-HM` (78 + 30 + 38 + 157 = 303 names).
//! Ordering is fixed at compile time and never depends on data.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemaId {
    #[serde(rename = "M")]
    M,
    #[serde(rename = "U-P")]
    UP,
    #[serde(rename = "U-HA")]
    UHA,
    #[serde(rename = "U-HM")]
    UHM,
    #[serde(rename = "U")]
    U,
    #[serde(rename = "ALL")]
    All,
}

impl SchemaId {
    pub const ALL_SCHEMAS: [SchemaId; 6] = [
        SchemaId::M,
        SchemaId::UP,
        SchemaId::UHA,
        SchemaId::UHM,
        SchemaId::U,
        SchemaId::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaId::M => "M",
            SchemaId::UP => "U-P",
            SchemaId::UHA => "U-HA",
            SchemaId::UHM => "U-HM",
            SchemaId::U => "U",
            SchemaId::All => "ALL",
        }
    }

    /// Column range of this schema inside the `ALL` dictionary.
    pub fn range(self) -> Range<usize> {
        match self {
            SchemaId::M => 0..M_LEN,
            SchemaId::UP => M_LEN..M_LEN + UP_LEN,
            SchemaId::UHA => M_LEN + UP_LEN..M_LEN + UP_LEN + UHA_LEN,
            SchemaId::UHM => M_LEN + UP_LEN + UHA_LEN..ALL_LEN,
            SchemaId::U => M_LEN..ALL_LEN,
            SchemaId::All => 0..ALL_LEN,
        }
    }

    pub fn len(self) -> usize {
        self.range().len()
    }

    pub fn is_empty(self) -> bool {
        false
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemaId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemaId::ALL_SCHEMAS
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| CoreError::UnknownSchema(s.to_string()))
    }
}

pub const M_LEN: usize = 78;
pub const UP_LEN: usize = 30;
pub const UHA_LEN: usize = 38;
pub const UHM_LEN: usize = 157;
pub const ALL_LEN: usize = M_LEN + UP_LEN + UHA_LEN + UHM_LEN;

pub const TOPIC_M_COUNT: usize = 19;
pub const TOPIC_G_COUNT: usize = 6;
pub const LDA_TOPICS: usize = 10;
pub const EMOTION_COUNT: usize = 7;
pub const TORS_LEN: usize = 10;

/// Value domain of a feature, used for range checks and by learners that need it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// In `[0, 1]`.
    Probability,
    /// In `[0, 1]`, and the named group sums to one.
    Simplex(&'static str),
    /// Non-negative integer code from a persisted vocabulary.
    Categorical,
    /// 0 or 1.
    Binary,
    /// Non-negative count.
    Count,
    /// In `[0, 100]`.
    Percentage,
    /// In `[-1, 1]`.
    Signed,
    /// Unbounded real value.
    Real,
}

/// Index of every M feature inside the 78-vector, by suffix (the name without `M_`).
pub mod m_index {
    pub const TOPIC_M: usize = 0;
    pub const TOPIC_M_MAIN: usize = 19;
    pub const TOPIC_M_NUM: usize = 20;
    pub const TOPIC_G: usize = 21;
    pub const TOPIC_G_MAIN: usize = 27;
    pub const TOPIC_G_NUM: usize = 28;
    pub const TOPIC_LDA: usize = 29;
    pub const CHAR_NUM: usize = 39;
    pub const WORD_NUM: usize = 40;
    pub const GRAMMAR1: usize = 41;
    pub const GRAMMAR2: usize = 42;
    pub const POLARITY: usize = 43;
    pub const SUBJECTIVITY: usize = 44;
    pub const IRONY: usize = 45;
    pub const OFFENSIVE: usize = 46;
    pub const EMOJI: usize = 47;
    pub const MASCULINITY: usize = 48;
    pub const READABILITY: usize = 49;
    pub const SENTIMENT: usize = 60;
    pub const SENTIMENT_MAIN: usize = 64;
    pub const EMOTION: usize = 65;
    pub const EMOTION_MAIN: usize = 72;
    pub const HATE: usize = 73;
    pub const HS_NUM: usize = 76;
    pub const HASHTAG: usize = 77;
}

fn m_suffixes() -> Vec<(String, FeatureKind)> {
    use FeatureKind::*;
    let mut out = Vec::with_capacity(M_LEN);
    for i in 1..=TOPIC_M_COUNT {
        out.push((format!("TopicM{i}"), Probability));
    }
    out.push(("TopicMMain".into(), Categorical));
    out.push(("TopicMNum".into(), Count));
    for i in 1..=TOPIC_G_COUNT {
        out.push((format!("TopicG{i}"), Probability));
    }
    out.push(("TopicGMain".into(), Categorical));
    out.push(("TopicGNum".into(), Count));
    for i in 1..=LDA_TOPICS {
        out.push((format!("TopicLDA{i}"), Simplex("lda")));
    }
    out.push(("CharNum".into(), Count));
    out.push(("WordNum".into(), Count));
    out.push(("Grammar1".into(), Probability));
    out.push(("Grammar2".into(), Probability));
    out.push(("Polarity".into(), Signed));
    out.push(("Subjectivity".into(), Probability));
    out.push(("Irony".into(), Probability));
    out.push(("Offensive".into(), Probability));
    out.push(("Emoji".into(), Categorical));
    out.push(("Masculinity".into(), Probability));
    for i in 1..=9 {
        out.push((format!("Readability{i}"), Real));
    }
    out.push(("Readability10".into(), Count));
    out.push(("Readability11".into(), Count));
    for i in 1..=3 {
        out.push((format!("Sentiment{i}"), Simplex("sentiment")));
    }
    out.push(("Sentiment4".into(), Signed));
    out.push(("SentimentMain".into(), Categorical));
    for i in 1..=EMOTION_COUNT {
        out.push((format!("Emotion{i}"), Probability));
    }
    out.push(("EmotionMain".into(), Categorical));
    for i in 1..=3 {
        out.push((format!("Hate{i}"), Probability));
    }
    out.push(("HsNum".into(), Count));
    out.push(("Hashtag".into(), Categorical));
    debug_assert_eq!(out.len(), M_LEN);
    out
}

fn profile_suffixes(counterpart: &str) -> Vec<(String, FeatureKind)> {
    use FeatureKind::*;
    vec![
        ("AccountAge".into(), Real),
        ("FollowerNum".into(), Count),
        ("FolloweeNum".into(), Count),
        ("TweetNum".into(), Count),
        ("ListedNum".into(), Count),
        ("SpreadActivity".into(), Probability),
        ("FollowerNumDay".into(), Real),
        ("FolloweeNumDay".into(), Real),
        ("TweetNumDay".into(), Real),
        ("ListedNumDay".into(), Real),
        ("ProfileVerified".into(), Binary),
        ("ProfileUrl".into(), Binary),
        ("LeaderRank".into(), Real),
        ("Indegree".into(), Count),
        (format!("Follow{counterpart}"), Binary),
    ]
}

fn history_action_suffixes() -> Vec<(String, FeatureKind)> {
    use FeatureKind::*;
    vec![
        ("TweetNum".into(), Count),
        ("TweetPercent".into(), Percentage),
        ("RetweetPercent".into(), Percentage),
        ("QuotePercent".into(), Percentage),
        ("ReplyPercent".into(), Percentage),
        ("InteractivePer".into(), Percentage),
        ("AverageInterval".into(), Real),
        ("RetweetedRate".into(), Real),
        ("QuotedRate".into(), Real),
        ("RepliedRate".into(), Real),
        ("LikedRate".into(), Real),
    ]
}

fn build_all() -> Vec<(String, FeatureKind)> {
    use FeatureKind::*;
    let mut out = Vec::with_capacity(ALL_LEN);
    let m = m_suffixes();
    out.extend(m.iter().map(|(n, k)| (format!("M_{n}"), *k)));

    for (side, other) in [("R", "S"), ("S", "R")] {
        out.extend(
            profile_suffixes(other)
                .into_iter()
                .map(|(n, k)| (format!("U-P_{side}_{n}"), k)),
        );
    }

    for side in ["R", "S"] {
        out.extend(
            history_action_suffixes()
                .into_iter()
                .map(|(n, k)| (format!("U-HA_{side}_{n}"), k)),
        );
    }
    out.push(("U-HA_RS_Mention".into(), Count));
    out.push(("U-HA_RS_MentionPer".into(), Percentage));
    out.push(("U-HA_SR_Mention".into(), Count));
    out.push(("U-HA_SR_MentionPer".into(), Percentage));
    out.push(("U-HA_RS_RepostLatency".into(), Real));
    for i in 1..=TORS_LEN {
        out.push((format!("U-HA_SR_TORS{i}"), Probability));
    }
    out.push(("U-HA_SR_PathWidth".into(), Real));

    for side in ["S", "R"] {
        out.extend(m.iter().map(|(n, k)| {
            // Averaging turns codes and counts into plain reals.
            let kind = match k {
                Categorical | Count => Real,
                other => *other,
            };
            (format!("U-HM_{side}_{n}"), kind)
        }));
    }
    out.push(("U-HM_SR_TopicSim".into(), Signed));
    debug_assert_eq!(out.len(), ALL_LEN);
    out
}

fn all_entries() -> &'static [(String, FeatureKind)] {
    static ALL: OnceLock<Vec<(String, FeatureKind)>> = OnceLock::new();
    ALL.get_or_init(build_all)
}

/// Ordered feature names of a schema.
pub fn feature_dictionary(schema: SchemaId) -> Vec<String> {
    all_entries()[schema.range()]
        .iter()
        .map(|(n, _)| n.clone())
        .collect()
}

/// Value domains aligned with [`feature_dictionary`].
pub fn feature_kinds(schema: SchemaId) -> Vec<FeatureKind> {
    all_entries()[schema.range()].iter().map(|(_, k)| *k).collect()
}

/// The 78 M feature names without the `M_` prefix.
pub fn m_feature_suffixes() -> Vec<String> {
    m_suffixes().into_iter().map(|(n, _)| n).collect()
}

/// Position of a feature name in the `ALL` dictionary.
pub fn position(name: &str) -> Option<usize> {
    all_entries().iter().position(|(n, _)| n == name)
}
