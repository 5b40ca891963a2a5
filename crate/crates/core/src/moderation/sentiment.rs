//! Multinomial Naive Bayes over tf-idf weighted unigrams and bigrams.
//!
//! Term weights are `tf * idf` with `tf` the raw count in a comment and
//! `idf = ln((1 + N) / (1 + df)) + 1` over the `N` training comments. Class
//! likelihoods are Laplace-smoothed over the accumulated tf-idf mass:
//!
//! ```text
//! P(t | c) = (mass_c(t) + alpha) / (sum_t' mass_c(t') + alpha * |V|)
//! ```

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Sentiment;
use crate::{Error, Result};

const TRAIN_FRACTION: f64 = 0.7;
const ALPHA: f64 = 1.0;

/// Lowercased runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Unigrams followed by space-joined bigrams.
pub fn sentiment_terms(text: &str) -> Vec<String> {
    let tokens = tokenize(text);
    let bigrams = tokens.windows(2).map(|w| format!("{} {}", w[0], w[1]));
    let mut terms = tokens.clone();
    terms.extend(bigrams);
    terms
}

fn term_counts(text: &str) -> BTreeMap<String, f64> {
    let mut counts = BTreeMap::new();
    for t in sentiment_terms(text) {
        *counts.entry(t).or_insert(0.0) += 1.0;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub df: u32,
    pub idf: f64,
    pub log_likelihood_positive: f64,
    pub log_likelihood_negative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentModel {
    pub schema_version: u32,
    pub documents: usize,
    pub alpha: f64,
    pub log_prior_positive: f64,
    pub log_prior_negative: f64,
    /// Log-probability of a term never seen in training, per class.
    pub unseen_positive: f64,
    pub unseen_negative: f64,
    pub terms: BTreeMap<String, TermEntry>,
    #[serde(default)]
    pub split_seed: Option<u64>,
}

impl SentimentModel {
    pub const SCHEMA_VERSION: u32 = 1;

    /// Fits on every document given (no held-out split).
    pub fn fit(docs: &[(String, Sentiment)]) -> Result<Self> {
        let n = docs.len();
        let positives = docs.iter().filter(|(_, l)| *l == Sentiment::Positive).count();
        let negatives = n - positives;
        if positives == 0 || negatives == 0 {
            return Err(Error::Training(format!(
                "sentiment training needs both classes, got {positives} positive and {negatives} negative"
            )));
        }

        let counted: Vec<(BTreeMap<String, f64>, Sentiment)> =
            docs.iter().map(|(text, label)| (term_counts(text), *label)).collect();
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for (counts, _) in &counted {
            for term in counts.keys() {
                *df.entry(term.as_str()).or_default() += 1;
            }
        }
        let idf = |df: u32| ((1.0 + n as f64) / (1.0 + df as f64)).ln() + 1.0;

        let mut mass: BTreeMap<&str, [f64; 2]> = BTreeMap::new();
        let mut totals = [0.0f64; 2];
        for (counts, label) in &counted {
            let c = class_index(*label);
            for (term, tf) in counts {
                let w = tf * idf(df[term.as_str()]);
                mass.entry(term.as_str()).or_insert([0.0; 2])[c] += w;
                totals[c] += w;
            }
        }

        let vocab = df.len() as f64;
        let denom = [totals[0] + ALPHA * vocab, totals[1] + ALPHA * vocab];
        let terms = df
            .iter()
            .map(|(term, &d)| {
                let m = mass[term];
                (
                    term.to_string(),
                    TermEntry {
                        df: d,
                        idf: idf(d),
                        log_likelihood_positive: ((m[0] + ALPHA) / denom[0]).ln(),
                        log_likelihood_negative: ((m[1] + ALPHA) / denom[1]).ln(),
                    },
                )
            })
            .collect();

        Ok(Self {
            schema_version: Self::SCHEMA_VERSION,
            documents: n,
            alpha: ALPHA,
            log_prior_positive: (positives as f64 / n as f64).ln(),
            log_prior_negative: (negatives as f64 / n as f64).ln(),
            unseen_positive: (ALPHA / denom[0]).ln(),
            unseen_negative: (ALPHA / denom[1]).ln(),
            terms,
            split_seed: None,
        })
    }

    pub fn log_prior(&self, class: Sentiment) -> f64 {
        match class {
            Sentiment::Positive => self.log_prior_positive,
            Sentiment::Negative => self.log_prior_negative,
        }
    }

    pub fn log_likelihood(&self, term: &str, class: Sentiment) -> Option<f64> {
        self.terms.get(term).map(|e| match class {
            Sentiment::Positive => e.log_likelihood_positive,
            Sentiment::Negative => e.log_likelihood_negative,
        })
    }

    /// tf-idf weights of the in-vocabulary terms of `text`.
    pub fn tfidf(&self, text: &str) -> BTreeMap<String, f64> {
        term_counts(text)
            .into_iter()
            .filter_map(|(term, tf)| self.terms.get(&term).map(|e| (term, tf * e.idf)))
            .collect()
    }

    /// Unnormalized log posteriors `[positive, negative]`.
    pub fn log_scores(&self, text: &str) -> [f64; 2] {
        let mut scores = [self.log_prior_positive, self.log_prior_negative];
        for (term, w) in self.tfidf(text) {
            let e = &self.terms[&term];
            scores[0] += w * e.log_likelihood_positive;
            scores[1] += w * e.log_likelihood_negative;
        }
        scores
    }

    /// Ties go to positive.
    pub fn classify(&self, text: &str) -> Sentiment {
        let [pos, neg] = self.log_scores(text);
        if pos >= neg {
            Sentiment::Positive
        } else {
            Sentiment::Negative
        }
    }
}

fn class_index(label: Sentiment) -> usize {
    match label {
        Sentiment::Positive => 0,
        Sentiment::Negative => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentReport {
    pub train: usize,
    pub test: usize,
    /// Held-out accuracy; `None` when the split leaves nothing to test.
    pub accuracy: Option<f64>,
    pub split_seed: u64,
}

/// Seeded 70/30 split, fit on the 70%, accuracy on the 30%.
pub fn train_sentiment(corpus: &[(String, Sentiment)], split_seed: u64) -> Result<(SentimentModel, SentimentReport)> {
    if corpus.is_empty() {
        return Err(Error::Training("empty sentiment corpus".into()));
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let n_train = ((corpus.len() as f64 * TRAIN_FRACTION).round() as usize).clamp(1, corpus.len());
    let (train_idx, test_idx) = order.split_at(n_train);

    let train: Vec<(String, Sentiment)> = train_idx.iter().map(|&i| corpus[i].clone()).collect();
    let mut model = SentimentModel::fit(&train)?;
    model.split_seed = Some(split_seed);

    let correct = test_idx
        .iter()
        .filter(|&&i| model.classify(&corpus[i].0) == corpus[i].1)
        .count();
    let report = SentimentReport {
        train: train_idx.len(),
        test: test_idx.len(),
        accuracy: (!test_idx.is_empty()).then(|| correct as f64 / test_idx.len() as f64),
        split_seed,
    };
    Ok((model, report))
}
