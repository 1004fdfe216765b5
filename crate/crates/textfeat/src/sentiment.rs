//! Lexicon-and-rule sentiment scorer.
//!
//! Token valences come from the sentiment lexicon and are adjusted by preceding
//! boosters, ALL-CAPS emphasis and negation within a three-token window. The
//! compound score normalizes the valence sum `s` as `s / sqrt(s² + 15)`.

use std::sync::Arc;

use crate::lexicon::Lexicons;

pub const NORMALIZATION_ALPHA: f64 = 15.0;
pub const NEGATION_SCALAR: f64 = -0.74;
pub const CAPS_INCREMENT: f64 = 0.733;
pub const EXCLAMATION_INCREMENT: f64 = 0.292;
pub const NEUTRAL_BAND: f64 = 0.05;
const WINDOW: usize = 3;
const BOOSTER_DECAY: [f64; WINDOW] = [1.0, 0.95, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

impl SentimentLabel {
    pub fn code(self) -> u8 {
        match self {
            SentimentLabel::Negative => 0,
            SentimentLabel::Neutral => 1,
            SentimentLabel::Positive => 2,
        }
    }

    pub fn from_compound(compound: f64) -> SentimentLabel {
        if compound >= NEUTRAL_BAND {
            SentimentLabel::Positive
        } else if compound <= -NEUTRAL_BAND {
            SentimentLabel::Negative
        } else {
            SentimentLabel::Neutral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentScores {
    pub neg: f64,
    pub neu: f64,
    pub pos: f64,
    pub compound: f64,
    pub label: SentimentLabel,
}

#[derive(Debug, Clone)]
pub struct SentimentAnalyzer {
    lexicons: Arc<Lexicons>,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn is_shouted(token: &str) -> bool {
    let letters: Vec<char> = token.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() > 1 && letters.iter().all(|c| c.is_uppercase())
}

pub fn normalize_compound(s: f64) -> f64 {
    (s / (s * s + NORMALIZATION_ALPHA).sqrt()).clamp(-1.0, 1.0)
}

impl SentimentAnalyzer {
    pub fn new(lexicons: Arc<Lexicons>) -> Self {
        SentimentAnalyzer { lexicons }
    }

    /// Per-token adjusted valences; tokens outside the lexicon score 0.
    pub fn valences(&self, text: &str) -> Vec<f64> {
        let raw: Vec<&str> = text
            .split_whitespace()
            .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric() && c != '\''))
            .filter(|t| !t.is_empty())
            .collect();
        let lower: Vec<String> = raw.iter().map(|t| t.to_lowercase()).collect();
        let mixed_case = raw.iter().any(|t| is_shouted(t)) && raw.iter().any(|t| !is_shouted(t));
        let lx = &self.lexicons;
        (0..raw.len())
            .map(|i| {
                let Some(&base) = lx.sentiment.get(&lower[i]) else {
                    return 0.0;
                };
                let mut v = base;
                if mixed_case && is_shouted(raw[i]) {
                    v += sign(v) * CAPS_INCREMENT;
                }
                for d in 1..=WINDOW.min(i) {
                    let prev = &lower[i - d];
                    if let Some(b) = lx.boosters.get(prev) {
                        v += sign(v) * b * BOOSTER_DECAY[d - 1];
                    }
                }
                if (1..=WINDOW.min(i)).any(|d| is_negation(&lower[i - d], lx)) {
                    v *= NEGATION_SCALAR;
                }
                v
            })
            .collect()
    }

    pub fn scores(&self, text: &str) -> SentimentScores {
        let vals = self.valences(text);
        let mut s: f64 = vals.iter().sum();
        if s != 0.0 {
            let bangs = text.chars().filter(|&c| c == '!').count().min(4) as f64;
            s += sign(s) * bangs * EXCLAMATION_INCREMENT;
        }
        let compound = normalize_compound(s);
        let pos_sum: f64 = vals.iter().filter(|v| **v > 0.0).map(|v| v + 1.0).sum();
        let neg_sum: f64 = vals.iter().filter(|v| **v < 0.0).map(|v| -v + 1.0).sum();
        let neu_sum = vals.iter().filter(|v| **v == 0.0).count() as f64;
        let total = pos_sum + neg_sum + neu_sum;
        let (neg, neu, pos) = if total > 0.0 {
            let neg = neg_sum / total;
            let pos = pos_sum / total;
            (neg, 1.0 - neg - pos, pos)
        } else {
            (0.0, 1.0, 0.0)
        };
        SentimentScores {
            neg,
            neu,
            pos,
            compound,
            label: SentimentLabel::from_compound(compound),
        }
    }
}

fn is_negation(token: &str, lx: &Lexicons) -> bool {
    lx.negations.contains(token) || token.ends_with("n't")
}

pub fn sentiment_scores(text: &str, lexicons: Arc<Lexicons>) -> SentimentScores {
    SentimentAnalyzer::new(lexicons).scores(text)
}
