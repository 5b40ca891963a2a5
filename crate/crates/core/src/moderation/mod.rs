//! Comment moderation: helpfulness regression, sentiment classification and
//! ranking of peer comments for display.

mod features;
mod pos;
mod ranking;
mod regression;
mod sentiment;
mod training;

pub use features::{
    extract_features, feature_names, CommentFeatures, FEATURE_DIM, FEATURE_LAYOUT_VERSION, WINDOW_WIDTHS,
};
pub use pos::{pos_counts, tag_text, tag_word, CoarseTag, PosCounts};
pub use ranking::{compare_scored, rank_comments, RankedComments, ScoredComment};
pub use regression::{fit_ols, score_helpfulness, train_helpfulness, HelpfulnessModel, OlsFit, RIDGE_LAMBDA};
pub use sentiment::{sentiment_terms, train_sentiment, tokenize, SentimentModel, SentimentReport, TermEntry};
pub use training::{
    read_training_csv, train_moderation, write_training_csv, CategoryMetrics, ModerationArtifacts, ModerationMetrics,
    TrainingRow,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::media::{BehaviorSeries, Signal};
use crate::{Error, Result};

/// Presentation quality a comment is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Movement,
    Friendliness,
    Speech,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Movement, Category::Friendliness, Category::Speech];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Movement => "movement",
            Category::Friendliness => "friendliness",
            Category::Speech => "speech",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "movement" => Ok(Category::Movement),
            "friendliness" => Ok(Category::Friendliness),
            "speech" => Ok(Category::Speech),
            other => Err(Error::Format(format!("unknown comment category {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sentiment {
    Positive,
    Negative,
}

impl Sentiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
        }
    }
}

impl FromStr for Sentiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "positive" | "pos" => Ok(Sentiment::Positive),
            "negative" | "neg" => Ok(Sentiment::Negative),
            other => Err(Error::Format(format!("unknown sentiment label {other:?}"))),
        }
    }
}

/// One peer comment on a video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub video_id: String,
    /// Reviewer identity; stripped before the comment reaches the video owner.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_id: Option<String>,
    pub text: String,
    pub category: Category,
    /// Seconds into the video the comment refers to.
    #[serde(default)]
    pub video_timestamp: Option<f64>,
    /// Unix seconds.
    pub created_at: i64,
}

impl Comment {
    pub fn validate(&self) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(Error::Format(format!("comment {} has empty text", self.id)));
        }
        if let Some(t) = self.video_timestamp {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Format(format!("comment {} has timestamp {t}", self.id)));
            }
        }
        Ok(())
    }
}

/// Sum of 1-4 crowd ratings for one comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelpfulnessLabel {
    pub comment_id: String,
    pub rater_scores: Vec<u8>,
}

impl HelpfulnessLabel {
    pub fn new(comment_id: impl Into<String>, rater_scores: Vec<u8>) -> Result<Self> {
        if let Some(s) = rater_scores.iter().find(|s| !(1..=4).contains(*s)) {
            return Err(Error::Format(format!("helpfulness rating {s} outside 1..=4")));
        }
        Ok(Self {
            comment_id: comment_id.into(),
            rater_scores,
        })
    }

    pub fn score(&self) -> u32 {
        self.rater_scores.iter().map(|&s| s as u32).sum()
    }
}

/// The trained models applied to incoming comments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Moderator {
    pub helpfulness: BTreeMap<Category, HelpfulnessModel>,
    pub sentiment: SentimentModel,
}

impl Moderator {
    /// Predicted helpfulness and sentiment for one comment. A category without
    /// a trained model scores 0.
    pub fn score(&self, comment: &Comment, series: &BTreeMap<Signal, BehaviorSeries>) -> Result<ScoredComment> {
        let features = extract_features(comment, series);
        let helpfulness = match self.helpfulness.get(&comment.category) {
            Some(model) => score_helpfulness(model, &features)?,
            None => 0.0,
        };
        Ok(ScoredComment {
            comment: comment.clone(),
            helpfulness,
            sentiment: self.sentiment.classify(&comment.text),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpfulness_label_sums() {
        let l = HelpfulnessLabel::new("c1", vec![4; 10]).unwrap();
        assert_eq!(l.score(), 40);
        let l = HelpfulnessLabel::new("c2", vec![1; 10]).unwrap();
        assert_eq!(l.score(), 10);
        assert!(HelpfulnessLabel::new("c3", vec![5]).is_err());
    }

    #[test]
    fn category_parsing() {
        assert_eq!("Speech".parse::<Category>().unwrap(), Category::Speech);
        assert!("posture".parse::<Category>().is_err());
    }
}
