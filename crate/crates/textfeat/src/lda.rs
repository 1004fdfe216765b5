//! Latent Dirichlet allocation by collapsed Gibbs sampling.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TextError};
use crate::tokenize::topic_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LdaConfig {
    pub k: usize,
    /// Document-topic prior; `None` means `50 / k`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub train_iters: usize,
    pub infer_iters: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            k: 10,
            alpha: None,
            beta: 0.01,
            train_iters: 200,
            infer_iters: 50,
            seed: 0,
        }
    }
}

impl LdaConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }
}

/// Trained topic-word distributions. Rows of `topic_word` sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "StoredModel", into = "StoredModel")]
pub struct TopicModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Sorted vocabulary.
    pub vocabulary: Vec<String>,
    pub topic_word: Vec<Vec<f64>>,
    pub stopwords: Vec<String>,
    index: HashMap<String, usize>,
    stopword_set: HashSet<String>,
}

#[derive(Serialize, Deserialize)]
struct StoredModel {
    k: usize,
    alpha: f64,
    beta: f64,
    vocabulary: Vec<String>,
    topic_word: Vec<Vec<f64>>,
    stopwords: Vec<String>,
}

impl From<StoredModel> for TopicModel {
    fn from(s: StoredModel) -> Self {
        TopicModel::new(s.k, s.alpha, s.beta, s.vocabulary, s.topic_word, s.stopwords)
    }
}

impl From<TopicModel> for StoredModel {
    fn from(m: TopicModel) -> Self {
        StoredModel {
            k: m.k,
            alpha: m.alpha,
            beta: m.beta,
            vocabulary: m.vocabulary,
            topic_word: m.topic_word,
            stopwords: m.stopwords,
        }
    }
}

impl TopicModel {
    pub fn new(k: usize, alpha: f64, beta: f64, vocabulary: Vec<String>, topic_word: Vec<Vec<f64>>, mut stopwords: Vec<String>) -> Self {
        stopwords.sort();
        let index = vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let stopword_set = stopwords.iter().cloned().collect();
        TopicModel {
            k,
            alpha,
            beta,
            vocabulary,
            topic_word,
            stopwords,
            index,
            stopword_set,
        }
    }

    pub fn word_id(&self, w: &str) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// In-vocabulary token ids of `text`.
    pub fn encode(&self, text: &str) -> Vec<usize> {
        topic_tokens(text, &self.stopword_set)
            .iter()
            .filter_map(|t| self.word_id(t))
            .collect()
    }

    /// Most probable words of topic `k`.
    pub fn top_words(&self, k: usize, n: usize) -> Vec<&str> {
        let mut ids: Vec<usize> = (0..self.vocabulary.len()).collect();
        ids.sort_by(|&a, &b| self.topic_word[k][b].total_cmp(&self.topic_word[k][a]).then(a.cmp(&b)));
        ids.into_iter().take(n).map(|i| self.vocabulary[i].as_str()).collect()
    }
}

fn sample(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

pub fn lda_train(texts: &[&str], stopwords: &HashSet<String>, cfg: &LdaConfig) -> Result<TopicModel> {
    if cfg.k == 0 {
        return Err(TextError::BadTopicCount(cfg.k));
    }
    if texts.is_empty() {
        return Err(TextError::EmptyCorpus);
    }
    let tokenized: Vec<Vec<String>> = texts.iter().map(|t| topic_tokens(t, stopwords)).collect();
    let mut vocabulary: Vec<String> = tokenized.iter().flatten().cloned().collect::<HashSet<_>>().into_iter().collect();
    vocabulary.sort();
    if vocabulary.is_empty() {
        return Err(TextError::EmptyVocabulary);
    }
    let index: HashMap<&str, usize> = vocabulary.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let docs: Vec<Vec<usize>> = tokenized
        .iter()
        .map(|d| d.iter().map(|w| index[w.as_str()]).collect())
        .collect();

    let (k, v) = (cfg.k, vocabulary.len());
    let (alpha, beta) = (cfg.alpha(), cfg.beta);
    let vbeta = v as f64 * beta;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut n_dk = vec![vec![0usize; k]; docs.len()];
    let mut n_kw = vec![vec![0usize; v]; k];
    let mut n_k = vec![0usize; k];
    let mut z: Vec<Vec<usize>> = docs
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            doc.iter()
                .map(|&w| {
                    let t = rng.random_range(0..k);
                    n_dk[d][t] += 1;
                    n_kw[t][w] += 1;
                    n_k[t] += 1;
                    t
                })
                .collect()
        })
        .collect();

    let mut p = vec![0.0; k];
    for _ in 0..cfg.train_iters {
        for (d, doc) in docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = z[d][i];
                n_dk[d][old] -= 1;
                n_kw[old][w] -= 1;
                n_k[old] -= 1;
                for t in 0..k {
                    p[t] = (n_dk[d][t] as f64 + alpha) * (n_kw[t][w] as f64 + beta) / (n_k[t] as f64 + vbeta);
                }
                let new = sample(&mut rng, &p);
                z[d][i] = new;
                n_dk[d][new] += 1;
                n_kw[new][w] += 1;
                n_k[new] += 1;
            }
        }
    }

    let topic_word = (0..k)
        .map(|t| {
            (0..v)
                .map(|w| (n_kw[t][w] as f64 + beta) / (n_k[t] as f64 + vbeta))
                .collect()
        })
        .collect();
    log::debug!("lda: {} docs, {} words, {} topics", docs.len(), v, k);
    Ok(TopicModel::new(k, alpha, beta, vocabulary, topic_word, stopwords.iter().cloned().collect()))
}

/// Topic mixture of `text`, averaged over the second half of `iters` Gibbs sweeps
/// with the topic-word distributions fixed. Uniform when `text` has no in-vocabulary token.
pub fn lda_infer(model: &TopicModel, text: &str, iters: usize, seed: u64) -> Vec<f64> {
    let k = model.k;
    let doc = model.encode(text);
    if doc.is_empty() {
        return vec![1.0 / k as f64; k];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_dk = vec![0usize; k];
    let mut z: Vec<usize> = doc
        .iter()
        .map(|_| {
            let t = rng.random_range(0..k);
            n_dk[t] += 1;
            t
        })
        .collect();
    let n = doc.len() as f64;
    let kalpha = k as f64 * model.alpha;
    let burn_in = iters / 2;
    let mut theta = vec![0.0; k];
    let mut p = vec![0.0; k];
    for it in 0..iters.max(1) {
        for (i, &w) in doc.iter().enumerate() {
            n_dk[z[i]] -= 1;
            for t in 0..k {
                p[t] = (n_dk[t] as f64 + model.alpha) * model.topic_word[t][w];
            }
            z[i] = sample(&mut rng, &p);
            n_dk[z[i]] += 1;
        }
        if it >= burn_in {
            for t in 0..k {
                theta[t] += (n_dk[t] as f64 + model.alpha) / (n + kalpha);
            }
        }
    }
    let total: f64 = theta.iter().sum();
    theta.iter().map(|x| x / total).collect()
}
