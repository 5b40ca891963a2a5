use std::collections::BTreeSet;
use std::path::Path;

use super::normalize_phrase;
use crate::Result;

/// Default filler lexicon, one entry per line.
pub const DEFAULT_FILLERS: &str = include_str!("../../data/fillers.txt");
/// Default English stopword list, one entry per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// A normalized set of words or phrases loaded from a one-per-line text file.
/// Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordList {
    entries: BTreeSet<String>,
}

impl WordList {
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .map(normalize_phrase)
            .filter(|e| !e.is_empty())
            .collect();
        Self { entries }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn default_fillers() -> Self {
        Self::parse(DEFAULT_FILLERS)
    }

    pub fn default_stopwords() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            entries: entries
                .into_iter()
                .map(|e| normalize_phrase(e.as_ref()))
                .filter(|e| !e.is_empty())
                .collect(),
        }
    }

    pub fn contains(&self, entry: &str) -> bool {
        self.entries.contains(entry)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest entry, in words.
    pub fn max_words(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.split(' ').count())
            .max()
            .unwrap_or(0)
    }
}
