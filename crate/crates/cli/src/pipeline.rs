//! Library form of the pipeline steps shared by the commands and the acceptance suite.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use repostlab_core::hash::sha256_hex;
use repostlab_core::{Corpus, FeatureTable, Instance};
use repostlab_textfeat::{lda_train, HashtagVocab, LdaConfig, Lexicons, PostFeaturizer, TopicModel};
use repostlab_userfeat::{FeaturizerConfig, InstanceFeaturizer, TextFeatureCache};
use serde::{Deserialize, Serialize};

/// Texts the topic model is fitted on: every distinct non-share text, in first-seen order.
pub fn topic_corpus(corpus: &Corpus) -> Vec<&str> {
    let mut seen = std::collections::HashSet::new();
    corpus
        .posts()
        .iter()
        .chain(corpus.users().iter().flat_map(|u| u.history.iter()))
        .filter(|p| !p.is_share())
        .map(|p| p.text.as_str())
        .filter(|t| seen.insert(*t))
        .collect()
}

pub fn train_topic_model(corpus: &Corpus, lexicons: &Lexicons, cfg: &LdaConfig) -> Result<TopicModel> {
    Ok(lda_train(&topic_corpus(corpus), &lexicons.stopwords, cfg)?)
}

pub fn post_featurizer(corpus: &Corpus, model: TopicModel, lexicons: Arc<Lexicons>) -> PostFeaturizer {
    PostFeaturizer::new(Arc::new(model), lexicons, HashtagVocab::new(corpus.hashtags()))
}

/// Identifies the text-feature configuration a cache was filled under.
pub fn text_fingerprint(pf: &PostFeaturizer) -> Result<u64> {
    let json = serde_json::to_string(&*pf.topic_model)?;
    let digest = sha256_hex(format!("{json}|{}|{}", pf.infer_iters, pf.seed).as_bytes());
    Ok(u64::from_str_radix(&digest[..16], 16)?)
}

/// Corpus with its fitted featurizer, ready to turn instances into ALL rows.
pub struct Featurizers {
    pub post: PostFeaturizer,
    pub cache: Arc<TextFeatureCache>,
    pub config: FeaturizerConfig,
}

impl Featurizers {
    /// Fits the topic model on `corpus`; a text-feature cache is read from `cache_dir` when present.
    pub fn fit(corpus: &Corpus, lda: &LdaConfig, cache_dir: Option<&Path>) -> Result<Self> {
        let model = train_topic_model(corpus, &Lexicons::builtin(), lda).context("topic model")?;
        Featurizers::from_model(corpus, model, lda, cache_dir)
    }

    pub fn topic_artifact(&self, lda: &LdaConfig) -> TopicArtifact {
        TopicArtifact {
            lda: *lda,
            model: (*self.post.topic_model).clone(),
        }
    }

    pub fn from_model(corpus: &Corpus, model: TopicModel, lda: &LdaConfig, cache_dir: Option<&Path>) -> Result<Self> {
        let mut post = post_featurizer(corpus, model, Arc::new(Lexicons::builtin()));
        post.infer_iters = lda.infer_iters;
        post.seed = lda.seed;
        let fingerprint = text_fingerprint(&post)?;
        let cache = match cache_dir {
            Some(dir) => TextFeatureCache::load(&cache_file(dir, fingerprint), fingerprint)?,
            None => TextFeatureCache::new(fingerprint),
        };
        Ok(Featurizers {
            post,
            cache: Arc::new(cache),
            config: FeaturizerConfig::default(),
        })
    }

    pub fn instance<'a>(&'a self, corpus: &'a Corpus) -> Result<InstanceFeaturizer<'a>> {
        Ok(InstanceFeaturizer::with_cache(corpus, &self.post, self.config, self.cache.clone())?)
    }

    pub fn table(&self, corpus: &Corpus, instances: &[Instance]) -> Result<FeatureTable> {
        Ok(self.instance(corpus)?.featurize_all(instances)?)
    }

    pub fn save_cache(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        let fingerprint = text_fingerprint(&self.post)?;
        Ok(self.cache.save(&cache_file(dir, fingerprint))?)
    }
}

pub fn cache_file(dir: &Path, fingerprint: u64) -> PathBuf {
    dir.join(format!("text-{fingerprint:016x}.bin"))
}

/// Topic model saved next to a dataset, with the settings it was fitted under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicArtifact {
    pub lda: LdaConfig,
    pub model: TopicModel,
}

impl TopicArtifact {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)? + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
