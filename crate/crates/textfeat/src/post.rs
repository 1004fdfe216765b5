//! Assembly of the 78-value M vector for one post.

use std::sync::Arc;

use repostlab_core::dictionary::m_index as mi;
use repostlab_core::dictionary::M_LEN;
use repostlab_core::RawPost;
use serde::{Deserialize, Serialize};

use crate::fnv1a;
use crate::lda::{lda_infer, TopicModel};
use crate::lexical::lexical_stats;
use crate::lexicon::Lexicons;
use crate::readability::readability_scores;
use crate::scorers::{argmax, ScorerRegistry, Slot};
use crate::sentiment::SentimentAnalyzer;

pub const MAIN_THRESHOLD: f64 = 0.5;

/// Persisted hashtag vocabulary; code 0 is reserved for unknown tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct HashtagVocab {
    tags: Vec<String>,
}

impl HashtagVocab {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(tags: I) -> Self {
        let mut tags: Vec<String> = tags.into_iter().map(Into::into).collect();
        tags.sort();
        tags.dedup();
        HashtagVocab { tags }
    }

    pub fn code(&self, tag: &str) -> usize {
        self.tags.binary_search_by(|t| t.as_str().cmp(tag)).map_or(0, |i| i + 1)
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }
}

#[derive(Debug, Clone)]
pub struct PostFeaturizer {
    pub topic_model: Arc<TopicModel>,
    pub registry: ScorerRegistry,
    pub lexicons: Arc<Lexicons>,
    pub hashtags: HashtagVocab,
    pub infer_iters: usize,
    pub seed: u64,
    sentiment: SentimentAnalyzer,
}

impl PostFeaturizer {
    pub fn new(topic_model: Arc<TopicModel>, lexicons: Arc<Lexicons>, hashtags: HashtagVocab) -> Self {
        PostFeaturizer {
            topic_model,
            registry: ScorerRegistry::builtin(lexicons.clone()),
            sentiment: SentimentAnalyzer::new(lexicons.clone()),
            lexicons,
            hashtags,
            infer_iters: 50,
            seed: 0,
        }
    }

    pub fn with_registry(mut self, registry: ScorerRegistry) -> Self {
        self.registry = registry;
        self
    }

    /// Hashtag code: the study hashtag when given, else the first known tag of the post.
    pub fn hashtag_code(&self, post: &RawPost, study_hashtag: Option<&str>) -> usize {
        match study_hashtag {
            Some(h) => self.hashtags.code(h),
            None => post.hashtags.iter().map(|h| self.hashtags.code(h)).find(|c| *c > 0).unwrap_or(0),
        }
    }

    /// Content features of `text`, without the trailing hashtag code.
    pub fn text_features(&self, text: &str) -> Vec<f64> {
        let mut v = Vec::with_capacity(M_LEN);
        let topic_m = self.registry.score(Slot::TopicM, text);
        push_with_summary(&mut v, &topic_m);
        let topic_g = self.registry.score(Slot::TopicG, text);
        push_with_summary(&mut v, &topic_g);
        debug_assert_eq!(v.len(), mi::TOPIC_LDA);
        let seed = self.seed ^ fnv1a(text.as_bytes());
        v.extend(lda_infer(&self.topic_model, text, self.infer_iters, seed));

        let (chars, words) = lexical_stats(text);
        debug_assert_eq!(v.len(), mi::CHAR_NUM);
        v.push(chars as f64);
        v.push(words as f64);
        v.extend(self.registry.score(Slot::Grammar, text));
        v.extend(self.registry.score(Slot::Polarity, text));
        v.extend(self.registry.score(Slot::Subjectivity, text));
        v.extend(self.registry.score(Slot::Irony, text));
        v.extend(self.registry.score(Slot::Offensive, text));
        v.extend(self.registry.score(Slot::Emoji, text));
        v.extend(self.registry.score(Slot::Masculinity, text));

        debug_assert_eq!(v.len(), mi::READABILITY);
        v.extend(readability_scores(text, &self.lexicons.familiar).to_vec());

        let s = self.sentiment.scores(text);
        debug_assert_eq!(v.len(), mi::SENTIMENT);
        v.extend([s.neg, s.neu, s.pos, s.compound, f64::from(s.label.code())]);

        let emotion = self.registry.score(Slot::Emotion, text);
        v.extend_from_slice(&emotion);
        v.push(argmax(&emotion) as f64);

        let hate = self.registry.score(Slot::Hate, text);
        debug_assert_eq!(v.len(), mi::HATE);
        v.extend_from_slice(&hate);
        v.push(hate.iter().filter(|h| **h > MAIN_THRESHOLD).count() as f64);
        debug_assert_eq!(v.len(), mi::HASHTAG);
        v
    }

    pub fn features(&self, post: &RawPost, study_hashtag: Option<&str>) -> Vec<f64> {
        let mut v = self.text_features(&post.text);
        v.push(self.hashtag_code(post, study_hashtag) as f64);
        debug_assert_eq!(v.len(), M_LEN);
        v
    }
}

/// Scores, then their 1-based argmax code, then the count above [`MAIN_THRESHOLD`].
fn push_with_summary(v: &mut Vec<f64>, scores: &[f64]) {
    v.extend_from_slice(scores);
    v.push((argmax(scores) + 1) as f64);
    v.push(scores.iter().filter(|s| **s > MAIN_THRESHOLD).count() as f64);
}

/// The M vector of `post` using the built-in lexicons and the given registry.
pub fn post_features(post: &RawPost, topic_model: Arc<TopicModel>, registry: &ScorerRegistry, hashtags: &HashtagVocab) -> Vec<f64> {
    let lexicons = Arc::new(Lexicons::builtin());
    PostFeaturizer::new(topic_model, lexicons, hashtags.clone())
        .with_registry(registry.clone())
        .features(post, None)
}
