//! Pseudo-word topic vocabularies and the fixed filler and sentiment word lists.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::WorldConfig;

/// Topic-neutral words mixed into every post.
pub const FUNCTION_WORDS: [&str; 24] = [
    "the", "a", "and", "of", "to", "in", "is", "it", "for", "on", "this", "that", "with", "we", "you", "they", "at", "so",
    "just", "about", "all", "now", "here", "today",
];
pub const POSITIVE_WORDS: [&str; 6] = ["good", "great", "love", "happy", "nice", "wonderful"];
pub const NEGATIVE_WORDS: [&str; 6] = ["bad", "hate", "sad", "terrible", "awful", "angry"];

const ONSETS: [&str; 16] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..4);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
        w.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
    }
    if rng.random_bool(0.4) {
        w.push_str(["n", "r", "s", "x"][rng.random_range(0..4)]);
    }
    w
}

/// One topic vocabulary per hashtag. Generated vocabularies never contain
/// filler, sentiment or hashtag words; with `vocab_overlap` > 0 a shared block
/// of tokens is prepended to each.
pub fn build_vocabularies(cfg: &WorldConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<String>> {
    if !cfg.vocabularies.is_empty() {
        return cfg.vocabularies.clone();
    }
    let mut taken: HashSet<String> = FUNCTION_WORDS.iter().chain(&POSITIVE_WORDS).chain(&NEGATIVE_WORDS).map(|s| s.to_string()).collect();
    taken.extend(cfg.hashtag_names());
    let mut fresh = |n: usize, rng: &mut ChaCha8Rng| -> Vec<String> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = pseudo_word(rng);
            if taken.insert(w.clone()) {
                out.push(w);
            }
        }
        out
    };
    let shared_n = (cfg.vocab_overlap * cfg.vocab_size as f64).round() as usize;
    let shared = fresh(shared_n, rng);
    (0..cfg.n_hashtags)
        .map(|_| {
            let mut v = shared.clone();
            v.extend(fresh(cfg.vocab_size - shared_n, rng));
            v
        })
        .collect()
}
