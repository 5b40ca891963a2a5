use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{normalize_word, TimedTranscript, WordList};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniqueWords {
    pub ratio: f64,
    pub distinct: usize,
    pub total: usize,
    /// No countable words; `ratio` is reported as 0.
    pub empty: bool,
}

/// Distinct normalized word forms over the number of words. Tokens that
/// normalize to nothing (bare punctuation) are not counted.
pub fn unique_word_ratio(transcript: &TimedTranscript) -> UniqueWords {
    let forms: Vec<String> = transcript
        .words()
        .iter()
        .map(|w| normalize_word(&w.text))
        .filter(|w| !w.is_empty())
        .collect();
    let total = forms.len();
    let distinct = forms.iter().collect::<HashSet<_>>().len();
    UniqueWords {
        ratio: if total == 0 { 0.0 } else { distinct as f64 / total as f64 },
        distinct,
        total,
        empty: total == 0,
    }
}

/// Most frequent non-stopword forms, by count descending then alphabetically.
pub fn word_frequencies(transcript: &TimedTranscript, stopwords: &WordList, top_n: usize) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for w in transcript.words() {
        let form = normalize_word(&w.text);
        if form.is_empty() || stopwords.contains(&form) {
            continue;
        }
        *counts.entry(form).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    // BTreeMap order is alphabetical; a stable sort keeps it among equal counts
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    ranked.truncate(top_n);
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillerInstance {
    /// The matched lexicon entry.
    pub word: String,
    /// Start time of the first matched token, seconds.
    pub start: f64,
}

/// Every lexicon match in transcript order. Multi-word entries match runs of
/// consecutive tokens; at one position longer entries are reported first.
pub fn detect_fillers(transcript: &TimedTranscript, lexicon: &WordList) -> Vec<FillerInstance> {
    let words = transcript.words();
    let forms: Vec<String> = words.iter().map(|w| normalize_word(&w.text)).collect();
    let longest = lexicon.max_words();
    let mut found = Vec::new();
    for i in 0..forms.len() {
        if forms[i].is_empty() {
            continue;
        }
        for n in (1..=longest.min(forms.len() - i)).rev() {
            let run = &forms[i..i + n];
            if run.iter().any(String::is_empty) {
                continue;
            }
            let phrase = run.join(" ");
            if lexicon.contains(&phrase) {
                found.push(FillerInstance {
                    word: phrase,
                    start: words[i].start,
                });
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speech::WordToken;

    fn transcript(text: &str) -> TimedTranscript {
        let words = text
            .split_whitespace()
            .enumerate()
            .map(|(i, w)| WordToken {
                text: w.into(),
                start: i as f64 * 0.5,
                end: i as f64 * 0.5 + 0.4,
                confidence: 1.0,
            })
            .collect();
        TimedTranscript::new(words, "en").unwrap()
    }

    #[test]
    fn ratio_of_simple_sentence() {
        let u = unique_word_ratio(&transcript("the cat sat on the mat"));
        assert_eq!((u.distinct, u.total), (5, 6));
        assert!((u.ratio - 5.0 / 6.0).abs() < 1e-12);
        assert!(!u.empty);
    }

    #[test]
    fn ratio_all_distinct_and_empty() {
        assert_eq!(unique_word_ratio(&transcript("one two three")).ratio, 1.0);
        let e = unique_word_ratio(&transcript(""));
        assert!(e.empty);
        assert_eq!(e.ratio, 0.0);
    }

    #[test]
    fn case_and_punctuation_collapse() {
        let u = unique_word_ratio(&transcript("Hello, hello HELLO!"));
        assert_eq!(u.distinct, 1);
    }

    #[test]
    fn frequencies_sorted() {
        let f = word_frequencies(&transcript("go go stop"), &WordList::default(), 10);
        assert_eq!(f, vec![("go".into(), 2), ("stop".into(), 1)]);
        let f = word_frequencies(&transcript("b a c a b"), &WordList::default(), 2);
        assert_eq!(f, vec![("a".into(), 2), ("b".into(), 2)]);
    }

    #[test]
    fn stopword_only_transcript() {
        let stop = WordList::from_entries(["the", "a"]);
        assert!(word_frequencies(&transcript("the a the"), &stop, 5).is_empty());
    }

    #[test]
    fn single_filler() {
        let t = TimedTranscript::new(
            vec![
                WordToken { text: "um".into(), start: 1.2, end: 1.4, confidence: 0.8 },
                WordToken { text: "hello".into(), start: 1.5, end: 1.9, confidence: 0.9 },
            ],
            "en",
        )
        .unwrap();
        let hits = detect_fillers(&t, &WordList::from_entries(["um"]));
        assert_eq!(hits, vec![FillerInstance { word: "um".into(), start: 1.2 }]);
        assert!(detect_fillers(&t, &WordList::default()).is_empty());
    }

    #[test]
    fn multi_word_filler() {
        let t = transcript("well you know it was, you know, fine");
        let hits = detect_fillers(&t, &WordList::from_entries(["you know"]));
        assert_eq!(
            hits,
            vec![
                FillerInstance { word: "you know".into(), start: 0.5 },
                FillerInstance { word: "you know".into(), start: 2.5 },
            ]
        );
    }
}
