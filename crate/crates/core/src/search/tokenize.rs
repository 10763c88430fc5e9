//! Unicode word segmentation, lower-cased. No stemming, no stop-words.

use unicode_segmentation::UnicodeSegmentation;

pub fn tokenize(text: &str) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).collect()
}

/// Tokens with their byte ranges in `text`.
pub fn tokenize_with_offsets(text: &str) -> Vec<(String, usize, usize)> {
    text.unicode_word_indices()
        .map(|(start, w)| (w.to_lowercase(), start, start + w.len()))
        .collect()
}

/// Distinct tokens in first-occurrence order.
pub fn query_terms(text: &str) -> Vec<String> {
    let mut seen = Vec::new();
    for t in tokenize(text) {
        if !seen.contains(&t) {
            seen.push(t);
        }
    }
    seen
}
