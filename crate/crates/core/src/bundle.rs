//! The feedback document a video owner reads.
//!
//! Control-condition bundles carry playback, peer comments and ratings.
//! Treatment bundles add the automated series, transcript analytics, ranked
//! comments and a summary. Serialized with [`FeedbackBundle::to_canonical_json`]
//! the document is byte-stable: keys are sorted and floats are rounded to
//! [`FLOAT_DECIMALS`] places.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::media::BehaviorSeries;
use crate::moderation::{Comment, RankedComments, ScoredComment};
use crate::speech::{FillerInstance, UniqueWords, WordProsody, WordToken};
use crate::workflow::Condition;
use crate::{Error, Result};

pub const BUNDLE_SCHEMA_VERSION: u32 = 1;

/// Decimal places kept for every float in canonical output.
pub const FLOAT_DECIMALS: i32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rater_id: Option<String>,
    pub quality: String,
    pub stars: u8,
}

/// Everything peers left on one video.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PeerFeedback {
    pub qualities: Vec<String>,
    pub comments: Vec<Comment>,
    pub ratings: Vec<RatingEntry>,
    /// Overall stars, one per review.
    pub overall: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Playback {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media_ref: Option<String>,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub quality: String,
    pub mean: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCount {
    pub word: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptSection {
    pub language_tag: String,
    pub words: Vec<WordToken>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomatedFeedback {
    /// Smile, movement, loudness and pitch, in that order.
    pub series: Vec<BehaviorSeries>,
    pub transcript: TranscriptSection,
    pub unique_words: UniqueWords,
    pub word_frequencies: Vec<WordCount>,
    pub fillers: Vec<FillerInstance>,
    pub word_prosody: Vec<WordProsody>,
}

/// Single-number takeaways shown above the charts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadlineMetrics {
    pub mean_smile: Option<f64>,
    pub mean_movement: Option<f64>,
    pub mean_loudness_db: Option<f64>,
    pub mean_pitch_hz: Option<f64>,
    /// Share of pitch frames that were voiced.
    pub voiced_fraction: Option<f64>,
    pub unique_word_ratio: f64,
    pub filler_count: usize,
    pub words_per_minute: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackSummary {
    pub quality_means: Vec<QualitySummary>,
    pub headline: HeadlineMetrics,
    pub top_positive: Option<ScoredComment>,
    pub top_negative: Option<ScoredComment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackBundle {
    pub schema_version: u32,
    pub video_id: String,
    pub condition: Condition,
    pub playback: Playback,
    pub qualities: Vec<String>,
    /// Chronological.
    pub comments: Vec<Comment>,
    pub ratings: Vec<RatingEntry>,
    pub ratings_summary: Vec<QualitySummary>,
    pub overall: QualitySummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automated: Option<AutomatedFeedback>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranked_comments: Option<RankedComments>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<FeedbackSummary>,
}

impl FeedbackBundle {
    /// Removes author and rater ids everywhere they occur, keeping order.
    pub fn strip_reviewer_ids(&mut self) {
        for c in &mut self.comments {
            c.author_id = None;
        }
        for r in &mut self.ratings {
            r.rater_id = None;
        }
        if let Some(ranked) = &mut self.ranked_comments {
            for s in ranked.top.iter_mut().chain(ranked.rest.iter_mut()) {
                s.comment.author_id = None;
            }
        }
        if let Some(summary) = &mut self.summary {
            for s in summary.top_positive.iter_mut().chain(summary.top_negative.iter_mut()) {
                s.comment.author_id = None;
            }
        }
    }

    /// Checks the sections present match the condition.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != BUNDLE_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: BUNDLE_SCHEMA_VERSION,
                found: self.schema_version,
            });
        }
        let automated = [
            self.automated.is_some(),
            self.ranked_comments.is_some(),
            self.summary.is_some(),
        ];
        match self.condition {
            Condition::Control if automated.iter().any(|&x| x) => Err(Error::Format(
                "control bundle carries automated sections".into(),
            )),
            Condition::Treatment if !automated.iter().all(|&x| x) => Err(Error::Format(
                "treatment bundle is missing automated sections".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Sorted keys, floats rounded, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        round_floats(&mut value);
        let mut out = serde_json::to_string_pretty(&value)?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let found = value
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Format("feedback bundle lacks schema_version".into()))?;
        if found != BUNDLE_SCHEMA_VERSION as u64 {
            return Err(Error::SchemaVersion {
                expected: BUNDLE_SCHEMA_VERSION,
                found: found as u32,
            });
        }
        let bundle: Self = serde_json::from_value(value)?;
        bundle.validate()?;
        Ok(bundle)
    }
}

/// Rounds a float to [`FLOAT_DECIMALS`] places.
pub fn round_float(x: f64) -> f64 {
    let scale = 10f64.powi(FLOAT_DECIMALS);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every non-integer number in a JSON tree.
pub fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *value = serde_json::Number::from_f64(round_float(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Mean stars per selected quality, in selection order.
pub fn summarize_ratings(qualities: &[String], ratings: &[RatingEntry]) -> Vec<QualitySummary> {
    qualities
        .iter()
        .map(|q| {
            let stars: Vec<f64> = ratings
                .iter()
                .filter(|r| &r.quality == q)
                .map(|r| r.stars as f64)
                .collect();
            QualitySummary {
                quality: q.clone(),
                mean: (!stars.is_empty()).then(|| stars.iter().sum::<f64>() / stars.len() as f64),
                count: stars.len(),
            }
        })
        .collect()
}
