//! Text normalization shared by every component that compares surface strings.
//!
//! Tokens are case-folded and accent-stripped; any character that is not a
//! Unicode letter or digit separates tokens. Ontology labels, lexicon phrases,
//! stopword lists and document text all go through the same function so that
//! matching never depends on where a string came from.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Split `text` into normalized tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.nfd() {
        if is_combining_mark(ch) {
            continue;
        }
        if ch.is_alphanumeric() {
            push_folded(&mut current, ch);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Normalized form of a multi-token surface string: its tokens joined by one space.
pub fn normalize(text: &str) -> String {
    tokenize(text).join(" ")
}

fn push_folded(out: &mut String, ch: char) {
    match ch {
        'œ' | 'Œ' => out.push_str("oe"),
        'æ' | 'Æ' => out.push_str("ae"),
        'ß' => out.push_str("ss"),
        _ => out.extend(ch.to_lowercase().flat_map(|c| c.nfd()).filter(|c| !is_combining_mark(*c))),
    }
}
