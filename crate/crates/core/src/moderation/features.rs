use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::pos::{pos_counts, PosCounts};
use super::Comment;
use crate::media::{sample_window, BehaviorSeries, Signal, WindowStats};

/// Total widths, in seconds, of the windows centered on a comment's timestamp.
pub const WINDOW_WIDTHS: [f64; 3] = [1.0, 2.0, 4.0];

pub const FEATURE_LAYOUT_VERSION: &str = "comment-features/v1";

/// 8 text features, 24 multimodal (mean, sd) slots, 3 per-window missing indicators.
pub const FEATURE_DIM: usize = 8 + 4 * 3 * 2 + 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentFeatures {
    pub char_count: usize,
    pub has_punctuation: bool,
    pub has_capitals: bool,
    pub pos_counts: PosCounts,
    /// Indexed `[signal][window]` in [`Signal::ALL`] and [`WINDOW_WIDTHS`] order.
    pub multimodal: [[WindowStats; 3]; 4],
}

impl CommentFeatures {
    pub fn text_only(char_count: usize, has_punctuation: bool, has_capitals: bool, pos_counts: PosCounts) -> Self {
        Self {
            char_count,
            has_punctuation,
            has_capitals,
            pos_counts,
            multimodal: [[WindowStats::MISSING; 3]; 4],
        }
    }

    /// A window is missing when any signal has no samples in it.
    pub fn window_missing(&self, window: usize) -> bool {
        self.multimodal.iter().any(|per_signal| per_signal[window].is_missing())
    }

    /// Dense vector in [`feature_names`] order, missing statistics imputed as 0.
    pub fn to_vector(&self) -> Vec<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let p = &self.pos_counts;
        let mut v = Vec::with_capacity(FEATURE_DIM);
        v.extend([
            self.char_count as f64,
            flag(self.has_punctuation),
            flag(self.has_capitals),
            p.noun as f64,
            p.verb as f64,
            p.adjective as f64,
            p.adverb as f64,
            p.other as f64,
        ]);
        for per_signal in &self.multimodal {
            for stats in per_signal {
                v.push(stats.mean.unwrap_or(0.0));
                v.push(stats.sd.unwrap_or(0.0));
            }
        }
        for w in 0..WINDOW_WIDTHS.len() {
            v.push(flag(self.window_missing(w)));
        }
        debug_assert_eq!(v.len(), FEATURE_DIM);
        v
    }
}

pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = [
        "char_count",
        "has_punctuation",
        "has_capitals",
        "pos_noun",
        "pos_verb",
        "pos_adjective",
        "pos_adverb",
        "pos_other",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for signal in Signal::ALL {
        for w in WINDOW_WIDTHS {
            names.push(format!("{}_{}s_mean", signal.name(), w));
            names.push(format!("{}_{}s_sd", signal.name(), w));
        }
    }
    for w in WINDOW_WIDTHS {
        names.push(format!("missing_{w}s"));
    }
    names
}

/// Text and time-anchored behavioral features for one comment.
pub fn extract_features(comment: &Comment, series: &BTreeMap<Signal, BehaviorSeries>) -> CommentFeatures {
    let text = &comment.text;
    let mut features = CommentFeatures::text_only(
        text.chars().count(),
        text.chars().any(|c| c.is_ascii_punctuation()),
        text.chars().any(char::is_uppercase),
        pos_counts(text),
    );
    if let Some(center) = comment.video_timestamp {
        for (si, signal) in Signal::ALL.iter().enumerate() {
            if let Some(s) = series.get(signal) {
                for (wi, width) in WINDOW_WIDTHS.iter().enumerate() {
                    features.multimodal[si][wi] = sample_window(s, center, *width);
                }
            }
        }
    }
    features
}
