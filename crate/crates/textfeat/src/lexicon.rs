//! Word lists backing the built-in scorers.
//!
//! Files are `term<TAB>value` lines (or bare terms for the set files); `#` lines and
//! blank lines are skipped. Terms are stored lowercase.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Result, TextError};

pub const EMOTIONS: [&str; 6] = ["anger", "joy", "fear", "disgust", "surprise", "sadness"];
pub const HATE_CATEGORIES: [&str; 3] = ["aggressive", "hateful", "target"];
pub const TOPIC_COUNT: usize = 19;
pub const EMOJI_CODES: usize = 9;

#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    pub sentiment: HashMap<String, f64>,
    pub boosters: HashMap<String, f64>,
    pub negations: HashSet<String>,
    pub subjectivity: HashMap<String, f64>,
    /// Keyword to 0-based topic index.
    pub topics: HashMap<String, usize>,
    /// Term to index into [`EMOTIONS`].
    pub emotions: HashMap<String, usize>,
    /// Term to index into [`HATE_CATEGORIES`].
    pub hate: HashMap<String, usize>,
    pub offensive: HashMap<String, f64>,
    /// Cue phrases, possibly multi-word.
    pub irony: Vec<(String, f64)>,
    pub masculinity: HashMap<String, f64>,
    /// Keyword to emoji code in 1..=9.
    pub emoji: HashMap<String, usize>,
    pub stopwords: HashSet<String>,
    pub familiar: HashSet<String>,
}

const FILES: [&str; 13] = [
    "sentiment.tsv",
    "boosters.tsv",
    "negations.txt",
    "subjectivity.tsv",
    "topics.tsv",
    "emotions.tsv",
    "hate.tsv",
    "offensive.tsv",
    "irony.tsv",
    "masculinity.tsv",
    "emoji.tsv",
    "stopwords.txt",
    "familiar.txt",
];

fn builtin_source(name: &str) -> &'static str {
    match name {
        "sentiment.tsv" => include_str!("../data/sentiment.tsv"),
        "boosters.tsv" => include_str!("../data/boosters.tsv"),
        "negations.txt" => include_str!("../data/negations.txt"),
        "subjectivity.tsv" => include_str!("../data/subjectivity.tsv"),
        "topics.tsv" => include_str!("../data/topics.tsv"),
        "emotions.tsv" => include_str!("../data/emotions.tsv"),
        "hate.tsv" => include_str!("../data/hate.tsv"),
        "offensive.tsv" => include_str!("../data/offensive.tsv"),
        "irony.tsv" => include_str!("../data/irony.tsv"),
        "masculinity.tsv" => include_str!("../data/masculinity.tsv"),
        "emoji.tsv" => include_str!("../data/emoji.tsv"),
        "stopwords.txt" => include_str!("../data/stopwords.txt"),
        "familiar.txt" => include_str!("../data/familiar.txt"),
        _ => unreachable!("unknown lexicon {name}"),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn pairs(name: &str, text: &str) -> Result<Vec<(usize, String, String)>> {
    content_lines(text)
        .map(|(line, l)| {
            let (term, value) = l.split_once('\t').ok_or_else(|| TextError::Lexicon {
                name: name.into(),
                line,
                message: "expected term<TAB>value".into(),
            })?;
            Ok((line, term.trim().to_lowercase(), value.trim().to_string()))
        })
        .collect()
}

fn weights(name: &str, text: &str) -> Result<HashMap<String, f64>> {
    pairs(name, text)?
        .into_iter()
        .map(|(line, term, v)| {
            let w = v.parse::<f64>().ok().filter(|w| w.is_finite()).ok_or_else(|| TextError::Lexicon {
                name: name.into(),
                line,
                message: format!("`{v}` is not a finite number"),
            })?;
            Ok((term, w))
        })
        .collect()
}

fn categories(name: &str, text: &str, labels: &[&str]) -> Result<HashMap<String, usize>> {
    pairs(name, text)?
        .into_iter()
        .map(|(line, term, v)| {
            let idx = labels.iter().position(|l| *l == v).ok_or_else(|| TextError::Lexicon {
                name: name.into(),
                line,
                message: format!("unknown category `{v}`"),
            })?;
            Ok((term, idx))
        })
        .collect()
}

fn codes(name: &str, text: &str, max: usize, offset: usize) -> Result<HashMap<String, usize>> {
    pairs(name, text)?
        .into_iter()
        .map(|(line, term, v)| {
            let code = v.parse::<usize>().ok().filter(|c| (1..=max).contains(c)).ok_or_else(|| TextError::Lexicon {
                name: name.into(),
                line,
                message: format!("code `{v}` outside 1..={max}"),
            })?;
            Ok((term, code - offset))
        })
        .collect()
}

fn word_set(text: &str) -> HashSet<String> {
    content_lines(text)
        .flat_map(|(_, l)| l.split_whitespace())
        .map(str::to_lowercase)
        .collect()
}

impl Lexicons {
    pub fn builtin() -> Lexicons {
        Lexicons::from_sources(|name| Ok(builtin_source(name).to_string()))
            .expect("built-in lexicons are well formed")
    }

    /// Reads lexicon files from `dir`; files absent from `dir` fall back to the built-in copy.
    pub fn load_dir(dir: &Path) -> Result<Lexicons> {
        Lexicons::from_sources(|name| {
            let path = dir.join(name);
            if path.exists() {
                std::fs::read_to_string(&path).map_err(|source| TextError::Io {
                    path: path.display().to_string(),
                    source,
                })
            } else {
                Ok(builtin_source(name).to_string())
            }
        })
    }

    fn from_sources(mut read: impl FnMut(&str) -> Result<String>) -> Result<Lexicons> {
        let mut src = HashMap::new();
        for name in FILES {
            src.insert(name, read(name)?);
        }
        let s = |n: &str| src[n].as_str();
        let mut irony: Vec<(String, f64)> = weights("irony.tsv", s("irony.tsv"))?.into_iter().collect();
        irony.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Lexicons {
            sentiment: weights("sentiment.tsv", s("sentiment.tsv"))?,
            boosters: weights("boosters.tsv", s("boosters.tsv"))?,
            negations: word_set(s("negations.txt")),
            subjectivity: weights("subjectivity.tsv", s("subjectivity.tsv"))?,
            topics: codes("topics.tsv", s("topics.tsv"), TOPIC_COUNT, 1)?,
            emotions: categories("emotions.tsv", s("emotions.tsv"), &EMOTIONS)?,
            hate: categories("hate.tsv", s("hate.tsv"), &HATE_CATEGORIES)?,
            offensive: weights("offensive.tsv", s("offensive.tsv"))?,
            irony,
            masculinity: weights("masculinity.tsv", s("masculinity.tsv"))?,
            emoji: codes("emoji.tsv", s("emoji.tsv"), EMOJI_CODES, 0)?,
            stopwords: word_set(s("stopwords.txt")),
            familiar: word_set(s("familiar.txt")),
        })
    }

    /// Every term known to any list; the spelling dictionary of the grammar scorer.
    pub fn known_word(&self, w: &str) -> bool {
        self.familiar.contains(w)
            || self.stopwords.contains(w)
            || self.sentiment.contains_key(w)
            || self.topics.contains_key(w)
            || self.emotions.contains_key(w)
            || self.subjectivity.contains_key(w)
            || self.boosters.contains_key(w)
            || self.negations.contains(w)
            || self.hate.contains_key(w)
            || self.offensive.contains_key(w)
            || self.masculinity.contains_key(w)
            || self.emoji.contains_key(w)
    }
}
