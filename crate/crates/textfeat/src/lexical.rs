/// `(CharNum, WordNum)`: Unicode scalar values and whitespace-delimited tokens.
pub fn lexical_stats(text: &str) -> (usize, usize) {
    (text.chars().count(), text.split_whitespace().count())
}
