//! Tokenization shared by the readability, scorer and topic-model code.
//!
//! Words are whitespace-delimited tokens that contain at least one alphanumeric
//! character. Sentences end at `.`, `!` or `?` followed by whitespace or end of text;
//! any non-empty text has at least one sentence.

use std::collections::HashSet;

/// Whitespace tokens that contain at least one alphanumeric character.
pub fn words(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .filter(|w| w.chars().any(char::is_alphanumeric))
        .collect()
}

/// Lowercased token with leading/trailing punctuation removed (inner apostrophes stay).
pub fn normalize(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Normalized, non-empty word tokens.
pub fn normalized_words(text: &str) -> Vec<String> {
    words(text)
        .into_iter()
        .map(normalize)
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn sentence_count(text: &str) -> usize {
    if words(text).is_empty() {
        return 0;
    }
    let chars: Vec<char> = text.chars().collect();
    let mut count = 0;
    let mut has_word = false;
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            has_word = true;
        }
        let terminal = matches!(c, '.' | '!' | '?');
        let boundary = terminal && chars.get(i + 1).is_none_or(|n| n.is_whitespace());
        if boundary && has_word {
            count += 1;
            has_word = false;
        }
    }
    if has_word {
        count += 1;
    }
    count.max(1)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable count with a silent-`e` rule; at least one per word.
pub fn syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    if letters.is_empty() {
        return usize::from(word.chars().any(char::is_alphanumeric));
    }
    let mut groups = 0;
    let mut prev_vowel = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = letters.len();
    let silent_e = n > 2 && letters[n - 1] == 'e' && letters[n - 2] != 'l' && !is_vowel(letters[n - 2]);
    if silent_e && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

/// Number of alphabetic-or-numeric characters of a word token.
pub fn letter_count(word: &str) -> usize {
    word.chars().filter(|c| c.is_alphanumeric()).count()
}

/// Tokens for the topic model: lowercase alphanumeric runs, stop words, single
/// characters and pure numbers removed.
pub fn topic_tokens(text: &str, stopwords: &HashSet<String>) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric() && c != '\'')
        .map(|t| t.trim_matches('\'').to_lowercase())
        .filter(|t| t.chars().count() > 1)
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .filter(|t| !stopwords.contains(t))
        .collect()
}
