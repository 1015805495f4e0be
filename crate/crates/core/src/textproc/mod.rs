//! Text extraction and normalization.
//!
//! Both corpora (report HTML and article wikitext) are reduced to plain text,
//! split into sentences and tokenized with the same normalizer that is applied
//! to taxonomy labels, so that label phrases and document text are directly
//! comparable token by token.

mod html;
mod sentences;
mod wikitext;

pub use html::{extract_html_title, strip_boilerplate};
pub use sentences::split_sentences;
pub use wikitext::strip_wikitext;

use unicode_normalization::UnicodeNormalization;

/// Normalize a piece of text into lowercase tokens.
///
/// Text is NFC-normalized, then split on every character that is not
/// alphanumeric (whitespace, hyphens and all punctuation are separators).
/// Each token is lowercased. Numeric tokens are kept. This is the single
/// normalization routine for labels and document text alike.
pub fn tokenize(text: &str) -> Vec<String> {
    let composed: String = text.nfc().collect();
    composed
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Sentence-split, tokenized text of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanText {
    sentences: Vec<Vec<String>>,
    char_len: usize,
}

impl CleanText {
    /// Build from extracted plain text. Sentences that yield no tokens are dropped.
    pub fn from_plain_text(text: &str) -> Self {
        let sentences = split_sentences(text)
            .iter()
            .map(|s| tokenize(s))
            .filter(|tokens| !tokens.is_empty())
            .collect();
        CleanText {
            sentences,
            char_len: text.chars().count(),
        }
    }

    /// Build directly from already tokenized sentences. Empty sentences and
    /// empty tokens are discarded and tokens are lowercased.
    pub fn from_sentences<I, S, T>(sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let sentences: Vec<Vec<String>> = sentences
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .filter(|t| !t.as_ref().is_empty())
                    .map(|t| t.as_ref().to_lowercase())
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        let char_len = sentences
            .iter()
            .map(|s| s.iter().map(|t| t.chars().count() + 1).sum::<usize>())
            .sum();
        CleanText {
            sentences,
            char_len,
        }
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    /// Character length of the text the sentences were extracted from.
    pub fn char_len(&self) -> usize {
        self.char_len
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// True if `phrase` occurs as a contiguous token run inside one sentence.
    pub fn contains_phrase(&self, phrase: &[&str]) -> bool {
        if phrase.is_empty() {
            return false;
        }
        self.sentences.iter().any(|s| {
            s.windows(phrase.len())
                .any(|w| w.iter().zip(phrase).all(|(a, b)| a == b))
        })
    }
}
