use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const TWO_DAYS: i64 = 2 * 24 * 3600;

/// Qualities an owner can ask peers to rate. The first eight are the ones
/// practitioners mention most; the rest round the list out to 23.
pub const DEFAULT_QUALITIES: [&str; 23] = [
    "eye contact",
    "pacing",
    "friendliness",
    "vocal variety",
    "articulation",
    "avoiding filler words",
    "explanation of concept",
    "body gestures",
    "confidence",
    "posture",
    "volume",
    "enthusiasm",
    "clarity of message",
    "organization",
    "smiling",
    "facial expressions",
    "conciseness",
    "storytelling",
    "use of examples",
    "pausing",
    "tone",
    "audience engagement",
    "opening and closing",
];

/// The interview prompts; the first and last are identical so the two
/// answers can be compared directly.
pub const DEFAULT_PROMPTS: [&str; 5] = [
    "Tell me about yourself",
    "Describe your biggest weakness",
    "Tell me about your greatest achievement",
    "Describe a conflict or challenge you face",
    "Tell me about yourself",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prompt {
    /// 1-based.
    pub index: u32,
    pub text: String,
    #[serde(default)]
    pub guideline_video_ref: Option<String>,
    /// Unix seconds.
    pub release_time: i64,
    #[serde(default)]
    pub deadline: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    /// Each unlock needs fresh reviews completed after the previous unlock.
    #[default]
    PerCycle,
    /// Prompt `p` needs `(p - 1) * reviews_required` reviews in total.
    Cumulative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkflowConfig {
    pub prompts: Vec<Prompt>,
    pub qualities: Vec<String>,
    pub qualities_per_video: usize,
    pub reviews_required: usize,
    pub comments_per_review: usize,
    pub gate_mode: GateMode,
    pub leaderboard_refresh_secs: i64,
    /// Upload limits.
    pub max_audio_secs: f64,
    pub max_frame_rate: f64,
}

impl Default for WorkflowConfig {
    fn default() -> Self {
        Self::with_schedule(0, TWO_DAYS)
    }
}

impl WorkflowConfig {
    /// Default prompts released every `spacing` seconds from `start`.
    pub fn with_schedule(start: i64, spacing: i64) -> Self {
        let prompts = DEFAULT_PROMPTS
            .iter()
            .enumerate()
            .map(|(i, text)| Prompt {
                index: i as u32 + 1,
                text: text.to_string(),
                guideline_video_ref: None,
                release_time: start + i as i64 * spacing,
                deadline: Some(start + (i as i64 + 1) * spacing),
            })
            .collect();
        Self {
            prompts,
            qualities: DEFAULT_QUALITIES.iter().map(|q| q.to_string()).collect(),
            qualities_per_video: 5,
            reviews_required: 3,
            comments_per_review: 3,
            gate_mode: GateMode::PerCycle,
            leaderboard_refresh_secs: TWO_DAYS,
            max_audio_secs: 180.0,
            max_frame_rate: 15.0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.prompts.is_empty() {
            return Err(Error::Parameter("at least one prompt is required".into()));
        }
        for (i, p) in self.prompts.iter().enumerate() {
            if p.index != i as u32 + 1 {
                return Err(Error::Parameter(format!(
                    "prompt indices must run 1..={} in order; found {} at position {}",
                    self.prompts.len(),
                    p.index,
                    i + 1
                )));
            }
            if i > 0 && p.release_time <= self.prompts[i - 1].release_time {
                return Err(Error::Parameter(format!(
                    "prompt {} is released no later than prompt {}",
                    p.index,
                    p.index - 1
                )));
            }
        }
        let distinct: BTreeSet<&str> = self.qualities.iter().map(String::as_str).collect();
        if distinct.len() != self.qualities.len() {
            return Err(Error::Parameter("quality list contains duplicates".into()));
        }
        if self.qualities.len() < self.qualities_per_video || self.qualities_per_video == 0 {
            return Err(Error::Parameter(format!(
                "{} qualities configured but {} must be selected per video",
                self.qualities.len(),
                self.qualities_per_video
            )));
        }
        if self.leaderboard_refresh_secs <= 0 {
            return Err(Error::Parameter("leaderboard refresh period must be positive".into()));
        }
        Ok(())
    }

    pub fn prompt(&self, index: u32) -> Option<&Prompt> {
        index
            .checked_sub(1)
            .and_then(|i| self.prompts.get(i as usize))
    }
}
