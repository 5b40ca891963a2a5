//! Transcript analytics over forced-aligned words.

mod analytics;
mod lexicon;
mod prosody;

pub use analytics::{detect_fillers, unique_word_ratio, word_frequencies, FillerInstance, UniqueWords};
pub use lexicon::{WordList, DEFAULT_FILLERS, DEFAULT_STOPWORDS};
pub use prosody::{word_prosody, WordProsody};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordToken {
    pub text: String,
    pub start: f64,
    pub end: f64,
    pub confidence: f64,
}

/// Ordered, non-overlapping timed words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimedTranscript {
    words: Vec<WordToken>,
    language_tag: String,
}

impl TimedTranscript {
    pub fn new(words: Vec<WordToken>, language_tag: impl Into<String>) -> Result<Self> {
        for (i, w) in words.iter().enumerate() {
            if !(w.start.is_finite() && w.end.is_finite() && w.start >= 0.0 && w.start <= w.end) {
                return Err(Error::Format(format!(
                    "word {i} ({:?}) has invalid times [{}, {}]",
                    w.text, w.start, w.end
                )));
            }
            if !(0.0..=1.0).contains(&w.confidence) {
                return Err(Error::Format(format!(
                    "word {i} ({:?}) has confidence {} outside [0, 1]",
                    w.text, w.confidence
                )));
            }
            if i > 0 && w.start < words[i - 1].end {
                return Err(Error::Format(format!(
                    "word {i} ({:?}) starts at {} before the previous word ends at {}",
                    w.text,
                    w.start,
                    words[i - 1].end
                )));
            }
        }
        Ok(Self {
            words,
            language_tag: language_tag.into(),
        })
    }

    pub fn words(&self) -> &[WordToken] {
        &self.words
    }

    pub fn language_tag(&self) -> &str {
        &self.language_tag
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Lowercases and trims non-alphanumeric characters from both ends; inner
/// apostrophes and hyphens survive (`"Don't!"` becomes `"don't"`).
pub fn normalize_word(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

/// Normalizes every whitespace-separated word of a (possibly multi-word) phrase.
pub fn normalize_phrase(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(normalize_word)
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(text: &str, start: f64, end: f64) -> WordToken {
        WordToken {
            text: text.into(),
            start,
            end,
            confidence: 0.9,
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_word("Don't!"), "don't");
        assert_eq!(normalize_word("\"Hello,"), "hello");
        assert_eq!(normalize_word("..."), "");
        assert_eq!(normalize_phrase("  You   KNOW, "), "you know");
    }

    #[test]
    fn overlapping_words_rejected() {
        let err = TimedTranscript::new(vec![tok("a", 0.0, 1.0), tok("b", 0.5, 1.2)], "en").unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn inverted_times_rejected() {
        assert!(TimedTranscript::new(vec![tok("a", 2.0, 1.0)], "en").is_err());
    }
}
