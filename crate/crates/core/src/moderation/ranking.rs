use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Comment, Sentiment};

/// A comment with its predicted helpfulness and sentiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredComment {
    pub comment: Comment,
    pub helpfulness: f64,
    pub sentiment: Sentiment,
}

fn helpfulness_key(h: f64) -> f64 {
    if h.is_nan() {
        f64::NEG_INFINITY
    } else {
        h
    }
}

/// Display order: more helpful first, then positive before negative, then
/// older first. Comment id breaks any remaining tie.
pub fn compare_scored(a: &ScoredComment, b: &ScoredComment) -> Ordering {
    helpfulness_key(b.helpfulness)
        .total_cmp(&helpfulness_key(a.helpfulness))
        .then_with(|| a.sentiment.cmp(&b.sentiment))
        .then_with(|| a.comment.created_at.cmp(&b.comment.created_at))
        .then_with(|| a.comment.id.cmp(&b.comment.id))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedComments {
    /// Highlighted section.
    pub top: Vec<ScoredComment>,
    pub rest: Vec<ScoredComment>,
}

impl RankedComments {
    pub fn iter(&self) -> impl Iterator<Item = &ScoredComment> {
        self.top.iter().chain(&self.rest)
    }

    pub fn len(&self) -> usize {
        self.top.len() + self.rest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty() && self.rest.is_empty()
    }
}

pub fn rank_comments(mut comments: Vec<ScoredComment>, top_k: usize) -> RankedComments {
    comments.sort_by(compare_scored);
    let rest = comments.split_off(top_k.min(comments.len()));
    RankedComments { top: comments, rest }
}
