//! Classic readability formulas over the tokenization in [`crate::tokenize`].

use std::collections::HashSet;

use crate::tokenize::{letter_count, normalize, sentence_count, syllables, words};

/// Raw counts every formula is computed from.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TextCounts {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub letters: usize,
    /// Words of three or more syllables.
    pub polysyllables: usize,
    /// Words of more than six letters.
    pub long_words: usize,
    /// Words outside the familiar-word list.
    pub difficult: usize,
}

/// Eleven values in `M_Readability1..11` order. The nine formula scores are NaN
/// when the text has no words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readability {
    pub kincaid: f64,
    pub ari: f64,
    pub coleman_liau: f64,
    pub flesch_reading_ease: f64,
    pub gunning_fog: f64,
    pub smog: f64,
    pub lix: f64,
    pub rix: f64,
    pub dale_chall: f64,
    pub polysyllables: f64,
    pub difficult_words: f64,
}

impl Readability {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.kincaid,
            self.ari,
            self.coleman_liau,
            self.flesch_reading_ease,
            self.gunning_fog,
            self.smog,
            self.lix,
            self.rix,
            self.dale_chall,
            self.polysyllables,
            self.difficult_words,
        ]
    }
}

fn familiar_form(w: &str, familiar: &HashSet<String>) -> bool {
    if w.chars().all(|c| c.is_ascii_digit()) || familiar.contains(w) {
        return true;
    }
    ["'s", "s", "es", "ed", "d", "ing", "ly"]
        .iter()
        .any(|suffix| w.strip_suffix(suffix).is_some_and(|stem| !stem.is_empty() && familiar.contains(stem)))
}

pub fn text_counts(text: &str, familiar: &HashSet<String>) -> TextCounts {
    let ws = words(text);
    let mut c = TextCounts {
        words: ws.len(),
        sentences: sentence_count(text),
        ..Default::default()
    };
    for w in ws {
        let s = syllables(w);
        c.syllables += s;
        let letters = letter_count(w);
        c.letters += letters;
        if s >= 3 {
            c.polysyllables += 1;
        }
        if letters > 6 {
            c.long_words += 1;
        }
        if !familiar_form(&normalize(w), familiar) {
            c.difficult += 1;
        }
    }
    c
}

pub fn scores_from_counts(c: &TextCounts) -> Readability {
    if c.words == 0 || c.sentences == 0 {
        return Readability {
            kincaid: f64::NAN,
            ari: f64::NAN,
            coleman_liau: f64::NAN,
            flesch_reading_ease: f64::NAN,
            gunning_fog: f64::NAN,
            smog: f64::NAN,
            lix: f64::NAN,
            rix: f64::NAN,
            dale_chall: f64::NAN,
            polysyllables: 0.0,
            difficult_words: 0.0,
        };
    }
    let w = c.words as f64;
    let s = c.sentences as f64;
    let syl = c.syllables as f64;
    let letters = c.letters as f64;
    let poly = c.polysyllables as f64;
    let long = c.long_words as f64;
    let pct_difficult = 100.0 * c.difficult as f64 / w;
    let mut dale_chall = 0.1579 * pct_difficult + 0.0496 * w / s;
    if pct_difficult > 5.0 {
        dale_chall += 3.6365;
    }
    Readability {
        kincaid: 11.8 * syl / w + 0.39 * w / s - 15.59,
        ari: 4.71 * letters / w + 0.5 * w / s - 21.43,
        coleman_liau: 0.0588 * (100.0 * letters / w) - 0.296 * (100.0 * s / w) - 15.8,
        flesch_reading_ease: 206.835 - 84.6 * syl / w - 1.015 * w / s,
        gunning_fog: 0.4 * (w / s + 100.0 * poly / w),
        smog: 1.0430 * (poly * 30.0 / s).sqrt() + 3.1291,
        lix: w / s + 100.0 * long / w,
        rix: long / s,
        dale_chall,
        polysyllables: poly,
        difficult_words: c.difficult as f64,
    }
}

pub fn readability_scores(text: &str, familiar: &HashSet<String>) -> Readability {
    scores_from_counts(&text_counts(text, familiar))
}
