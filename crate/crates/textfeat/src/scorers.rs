//! Named, replaceable text scorers.
//!
//! Each [`Slot`] has a fixed output width and range. The built-in implementations
//! are lexicon heuristics. Any [`TextScorer`] of the right width can be registered
//! in their place.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, TextError};
use crate::lexicon::{Lexicons, EMOJI_CODES, EMOTIONS, TOPIC_COUNT};
use crate::tokenize::{normalized_words, sentence_count, words};

pub trait TextScorer: Send + Sync {
    fn score(&self, text: &str) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    TopicM,
    TopicG,
    Emotion,
    Irony,
    Offensive,
    Masculinity,
    Emoji,
    Hate,
    Grammar,
    Polarity,
    Subjectivity,
}

impl Slot {
    pub const ALL: [Slot; 11] = [
        Slot::TopicM,
        Slot::TopicG,
        Slot::Emotion,
        Slot::Irony,
        Slot::Offensive,
        Slot::Masculinity,
        Slot::Emoji,
        Slot::Hate,
        Slot::Grammar,
        Slot::Polarity,
        Slot::Subjectivity,
    ];

    pub fn width(self) -> usize {
        match self {
            Slot::TopicM => TOPIC_COUNT,
            Slot::TopicG => TOPIC_GROUPS,
            Slot::Emotion => EMOTIONS.len() + 1,
            Slot::Hate => 3,
            Slot::Grammar => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::TopicM => "topicM",
            Slot::TopicG => "topicG",
            Slot::Emotion => "emotion",
            Slot::Irony => "irony",
            Slot::Offensive => "offensive",
            Slot::Masculinity => "masculinity",
            Slot::Emoji => "emoji",
            Slot::Hate => "hate",
            Slot::Grammar => "grammar",
            Slot::Polarity => "polarity",
            Slot::Subjectivity => "subjectivity",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const TOPIC_GROUPS: usize = 6;

/// Coarse group of each 0-based fine topic.
pub const TOPIC_GROUP_OF: [usize; TOPIC_COUNT] = [
    0, // arts & culture
    1, // business & entrepreneurs
    2, // celebrity & pop culture
    3, // diaries & daily life
    3, // family
    2, // fashion & style
    2, // film, tv & video
    3, // fitness & health
    3, // food & dining
    4, // gaming
    0, // learning & educational
    2, // music
    1, // news & social concern
    3, // other hobbies
    3, // relationships
    5, // science & technology
    4, // sports
    3, // travel & adventure
    3, // youth & student life
];

fn saturate(x: f64) -> f64 {
    1.0 - (-x).exp()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Index of the first maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn topic_hits(lx: &Lexicons, text: &str) -> [f64; TOPIC_COUNT] {
    let mut hits = [0.0; TOPIC_COUNT];
    for w in normalized_words(text) {
        let key = w.trim_start_matches('#');
        if let Some(&t) = lx.topics.get(key) {
            hits[t] += 1.0;
        }
    }
    hits
}

struct TopicM(Arc<Lexicons>);

impl TextScorer for TopicM {
    fn score(&self, text: &str) -> Vec<f64> {
        topic_hits(&self.0, text).iter().map(|h| saturate(*h)).collect()
    }
}

struct TopicG(Arc<Lexicons>);

impl TextScorer for TopicG {
    /// Smoothed simplex over the coarse groups; uniform when no keyword matches.
    fn score(&self, text: &str) -> Vec<f64> {
        let mut g = [0.0; TOPIC_GROUPS];
        for (t, h) in topic_hits(&self.0, text).iter().enumerate() {
            g[TOPIC_GROUP_OF[t]] += h;
        }
        let prior = 0.1;
        let total: f64 = g.iter().sum::<f64>() + prior * TOPIC_GROUPS as f64;
        g.iter().map(|h| (h + prior) / total).collect()
    }
}

struct Emotion(Arc<Lexicons>);

impl TextScorer for Emotion {
    /// Six emotion probabilities then `others`; sums to 1.
    fn score(&self, text: &str) -> Vec<f64> {
        let mut hits = [0.0; EMOTIONS.len()];
        for w in normalized_words(text) {
            if let Some(&e) = self.0.emotions.get(&w) {
                hits[e] += 1.0;
            }
        }
        let denom = hits.iter().sum::<f64>() + 1.0;
        hits.iter().map(|h| h / denom).chain([1.0 / denom]).collect()
    }
}

struct Irony(Arc<Lexicons>);

impl TextScorer for Irony {
    fn score(&self, text: &str) -> Vec<f64> {
        let padded = format!(" {} ", normalized_words(text).join(" "));
        let weight: f64 = self
            .0
            .irony
            .iter()
            .map(|(cue, w)| padded.matches(&format!(" {cue} ")).count() as f64 * w)
            .sum();
        let quotes = text.matches("\"").count() / 2;
        vec![saturate(weight.max(0.0) + 0.3 * quotes as f64)]
    }
}

struct Offensive(Arc<Lexicons>);

impl TextScorer for Offensive {
    fn score(&self, text: &str) -> Vec<f64> {
        let weight: f64 = normalized_words(text)
            .iter()
            .filter_map(|w| self.0.offensive.get(w))
            .sum();
        vec![saturate(weight.max(0.0))]
    }
}

struct Masculinity(Arc<Lexicons>);

impl TextScorer for Masculinity {
    fn score(&self, text: &str) -> Vec<f64> {
        let weight: f64 = normalized_words(text)
            .iter()
            .filter_map(|w| self.0.masculinity.get(w))
            .sum();
        vec![sigmoid(weight)]
    }
}

struct Emoji(Arc<Lexicons>);

impl TextScorer for Emoji {
    /// Most frequent cued emoji code, 0 when nothing matches.
    fn score(&self, text: &str) -> Vec<f64> {
        let mut counts = [0.0; EMOJI_CODES + 1];
        for w in normalized_words(text) {
            if let Some(&c) = self.0.emoji.get(&w) {
                counts[c] += 1.0;
            }
        }
        let best = argmax(&counts[1..]) + 1;
        vec![if counts[best] > 0.0 { best as f64 } else { 0.0 }]
    }
}

struct Hate(Arc<Lexicons>);

impl TextScorer for Hate {
    /// `(aggressive, hateful, targeted)`; targeting needs both a target cue and hostility.
    fn score(&self, text: &str) -> Vec<f64> {
        let mut hits = [0.0; 3];
        for w in normalized_words(text) {
            if let Some(&c) = self.0.hate.get(&w) {
                hits[c] += 1.0;
            }
        }
        hits[2] += words(text).iter().filter(|w| w.starts_with('@')).count() as f64;
        let aggressive = saturate(hits[0]);
        let hateful = saturate(hits[1]);
        vec![aggressive, hateful, saturate(hits[2]) * aggressive.max(hateful)]
    }
}

struct Grammar(Arc<Lexicons>);

impl Grammar {
    fn penalties(text: &str) -> f64 {
        let tokens: Vec<&str> = words(text);
        let mut p = 0.0;
        if let Some(first) = tokens.first() {
            if first.chars().next().is_some_and(char::is_lowercase) {
                p += 1.0;
            }
        }
        let chars: Vec<char> = text.chars().collect();
        for i in 0..chars.len() {
            if matches!(chars[i], '.' | '!' | '?') && chars.get(i + 1).is_some_and(|c| c.is_whitespace()) {
                let next = chars[i + 1..].iter().find(|c| !c.is_whitespace());
                if next.is_some_and(|c| c.is_lowercase()) {
                    p += 1.0;
                }
            }
            if i > 0 && matches!(chars[i], '!' | '?' | ',') && chars[i] == chars[i - 1] && chars.get(i + 1) != Some(&chars[i]) {
                p += 1.0;
            }
        }
        let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        p += lower.windows(2).filter(|w| w[0] == w[1]).count() as f64;
        p += tokens.iter().filter(|t| **t == "i").count() as f64;
        p
    }
}

impl TextScorer for Grammar {
    /// `(dictionary-hit rate, 1 - normalized style penalty)`, both in `[0, 1]`.
    fn score(&self, text: &str) -> Vec<f64> {
        let alpha: Vec<String> = normalized_words(text)
            .into_iter()
            .filter(|w| w.chars().all(|c| c.is_alphabetic() || c == '\''))
            .collect();
        let spelling = if alpha.is_empty() {
            1.0
        } else {
            alpha.iter().filter(|w| self.0.known_word(w)).count() as f64 / alpha.len() as f64
        };
        let sentences = sentence_count(text).max(1) as f64;
        let style = (-0.5 * Grammar::penalties(text) / sentences).exp();
        vec![spelling, style]
    }
}

/// Per-hit polarity in `[-1, 1]`: valence / 4, flipped and halved after a negation,
/// amplified after a booster.
fn hit_polarities(lx: &Lexicons, text: &str) -> Vec<f64> {
    let toks = normalized_words(text);
    toks.iter()
        .enumerate()
        .filter_map(|(i, w)| {
            let v = lx.sentiment.get(w)?;
            let mut p = v / 4.0;
            if i > 0 && lx.boosters.get(&toks[i - 1]).is_some_and(|b| *b > 0.0) {
                p *= 1.3;
            }
            if i > 0 && (lx.negations.contains(&toks[i - 1]) || toks[i - 1].ends_with("n't")) {
                p *= -0.5;
            }
            Some(p.clamp(-1.0, 1.0))
        })
        .collect()
}

struct Polarity(Arc<Lexicons>);

impl TextScorer for Polarity {
    fn score(&self, text: &str) -> Vec<f64> {
        let hits = hit_polarities(&self.0, text);
        let mean = if hits.is_empty() { 0.0 } else { hits.iter().sum::<f64>() / hits.len() as f64 };
        vec![mean.clamp(-1.0, 1.0)]
    }
}

struct Subjectivity(Arc<Lexicons>);

impl TextScorer for Subjectivity {
    /// Mean subjectivity over opinion-bearing words; sentiment words count as 0.5 when unlisted.
    fn score(&self, text: &str) -> Vec<f64> {
        let hits: Vec<f64> = normalized_words(text)
            .iter()
            .filter_map(|w| {
                self.0
                    .subjectivity
                    .get(w)
                    .copied()
                    .or_else(|| self.0.sentiment.get(w).map(|_| 0.5))
            })
            .collect();
        let mean = if hits.is_empty() { 0.0 } else { hits.iter().sum::<f64>() / hits.len() as f64 };
        vec![mean.clamp(0.0, 1.0)]
    }
}

#[derive(Clone)]
pub struct ScorerRegistry {
    scorers: BTreeMap<Slot, Arc<dyn TextScorer>>,
}

impl fmt::Debug for ScorerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.scorers.keys()).finish()
    }
}

impl ScorerRegistry {
    pub fn builtin(lx: Arc<Lexicons>) -> ScorerRegistry {
        let mut scorers: BTreeMap<Slot, Arc<dyn TextScorer>> = BTreeMap::new();
        scorers.insert(Slot::TopicM, Arc::new(TopicM(lx.clone())));
        scorers.insert(Slot::TopicG, Arc::new(TopicG(lx.clone())));
        scorers.insert(Slot::Emotion, Arc::new(Emotion(lx.clone())));
        scorers.insert(Slot::Irony, Arc::new(Irony(lx.clone())));
        scorers.insert(Slot::Offensive, Arc::new(Offensive(lx.clone())));
        scorers.insert(Slot::Masculinity, Arc::new(Masculinity(lx.clone())));
        scorers.insert(Slot::Emoji, Arc::new(Emoji(lx.clone())));
        scorers.insert(Slot::Hate, Arc::new(Hate(lx.clone())));
        scorers.insert(Slot::Grammar, Arc::new(Grammar(lx.clone())));
        scorers.insert(Slot::Polarity, Arc::new(Polarity(lx.clone())));
        scorers.insert(Slot::Subjectivity, Arc::new(Subjectivity(lx)));
        ScorerRegistry { scorers }
    }

    /// Replaces the scorer of `slot`; the replacement is probed once for its width.
    pub fn register(&mut self, slot: Slot, scorer: Arc<dyn TextScorer>) -> Result<()> {
        let actual = scorer.score("probe text.").len();
        if actual != slot.width() {
            return Err(TextError::ScorerWidth {
                slot: slot.to_string(),
                expected: slot.width(),
                actual,
            });
        }
        self.scorers.insert(slot, scorer);
        Ok(())
    }

    pub fn score(&self, slot: Slot, text: &str) -> Vec<f64> {
        let out = self.scorers[&slot].score(text);
        debug_assert_eq!(out.len(), slot.width(), "{slot}");
        out
    }
}
