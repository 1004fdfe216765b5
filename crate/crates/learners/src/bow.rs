//! TF-IDF bag of words over a corpus-fit vocabulary.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::matrix::Matrix;

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '#'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "StoredBow", into = "StoredBow")]
pub struct BowEncoder {
    pub vocab: Vec<String>,
    /// Smoothed inverse document frequency `ln((1 + N) / (1 + df)) + 1`.
    pub idf: Vec<f64>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct StoredBow {
    vocab: Vec<String>,
    idf: Vec<f64>,
}

impl From<StoredBow> for BowEncoder {
    fn from(s: StoredBow) -> Self {
        BowEncoder::from_parts(s.vocab, s.idf)
    }
}

impl From<BowEncoder> for StoredBow {
    fn from(b: BowEncoder) -> Self {
        StoredBow { vocab: b.vocab, idf: b.idf }
    }
}

impl BowEncoder {
    /// Keeps the `vocab_size` most frequent tokens, ties by token.
    pub fn fit(texts: &[&str], vocab_size: usize) -> Result<Self> {
        let mut freq: HashMap<String, usize> = HashMap::new();
        let mut df: HashMap<String, usize> = HashMap::new();
        for t in texts {
            let mut seen: Vec<String> = Vec::new();
            for tok in tokens(t) {
                *freq.entry(tok.clone()).or_default() += 1;
                seen.push(tok);
            }
            seen.sort();
            seen.dedup();
            for tok in seen {
                *df.entry(tok).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(vocab_size);
        if ranked.is_empty() {
            return Err(LearnError::EmptyVocabulary);
        }
        let n = texts.len() as f64;
        let vocab: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
        let idf = vocab.iter().map(|t| ((1.0 + n) / (1.0 + df[t] as f64)).ln() + 1.0).collect();
        Ok(BowEncoder::from_parts(vocab, idf))
    }

    pub fn from_parts(vocab: Vec<String>, idf: Vec<f64>) -> Self {
        let index = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        BowEncoder { vocab, idf, index }
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// Raw counts times idf; out-of-vocabulary tokens are dropped.
    pub fn transform(&self, text: &str) -> Vec<f64> {
        let mut row = vec![0.0; self.vocab.len()];
        for tok in tokens(text) {
            if let Some(&i) = self.index.get(&tok) {
                row[i] += self.idf[i];
            }
        }
        row
    }

    pub fn transform_all(&self, texts: &[&str]) -> Matrix {
        let mut m = Matrix::zeros(texts.len(), self.vocab.len());
        for (i, t) in texts.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&self.transform(t));
        }
        m
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.vocab.iter().map(|t| format!("BOW_{t}")).collect()
    }
}

/// Fits an encoder on `texts` and encodes them.
pub fn bow_encode(texts: &[&str], vocab_size: usize) -> Result<(BowEncoder, Matrix)> {
    let enc = BowEncoder::fit(texts, vocab_size)?;
    let m = enc.transform_all(texts);
    Ok((enc, m))
}
