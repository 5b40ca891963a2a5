use serde::{Deserialize, Serialize};

use super::{BehaviorSeries, FrameSequence, Signal};
use crate::{Error, Result};

/// Per-frame scores as reported by a smile detector, in the detector's own range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmileProviderInput {
    pub scores: Vec<f64>,
    /// Declared `(min, max)` of the detector output.
    pub range: (f64, f64),
    #[serde(default)]
    pub synthetic: bool,
}

/// Source of per-frame smile scores.
pub trait SmileProvider {
    fn scores(&self, frames: &FrameSequence) -> Result<SmileProviderInput>;
}

/// Stand-in used when no detector is configured: every frame scores zero
/// and the resulting series is flagged synthetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSmileProvider;

impl SmileProvider for ZeroSmileProvider {
    fn scores(&self, frames: &FrameSequence) -> Result<SmileProviderInput> {
        Ok(SmileProviderInput {
            scores: vec![0.0; frames.len()],
            range: (0.0, 1.0),
            synthetic: true,
        })
    }
}

/// Scores precomputed by an external detector and shipped as a sidecar file.
#[derive(Debug, Clone)]
pub struct SidecarSmileProvider {
    input: SmileProviderInput,
}

impl SidecarSmileProvider {
    pub fn new(input: SmileProviderInput) -> Self {
        Self { input }
    }
}

impl SmileProvider for SidecarSmileProvider {
    fn scores(&self, _frames: &FrameSequence) -> Result<SmileProviderInput> {
        Ok(self.input.clone())
    }
}

/// Rescales detector scores from their declared range onto `[0, 100]`.
pub fn smile_series(input: &SmileProviderInput, frame_count: usize, frame_rate: f64) -> Result<BehaviorSeries> {
    if input.scores.len() != frame_count {
        return Err(Error::Format(format!(
            "smile provider returned {} scores for {frame_count} frames",
            input.scores.len()
        )));
    }
    let (lo, hi) = input.range;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Parameter(format!("smile range [{lo}, {hi}] is empty")));
    }
    if !(frame_rate > 0.0) {
        return Err(Error::Parameter(format!("frame rate {frame_rate} must be positive")));
    }
    let values = input
        .scores
        .iter()
        .map(|&s| Some((100.0 * (s - lo) / (hi - lo)).clamp(0.0, 100.0)))
        .collect();
    let mut series = BehaviorSeries::new(Signal::Smile, 0.0, 1.0 / frame_rate, values);
    series.synthetic = input.synthetic;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(scores: Vec<f64>) -> SmileProviderInput {
        SmileProviderInput {
            scores,
            range: (0.0, 1.0),
            synthetic: false,
        }
    }

    #[test]
    fn midpoint_maps_to_fifty() {
        let s = smile_series(&input(vec![0.5; 4]), 4, 15.0).unwrap();
        assert!(s.values.iter().all(|v| *v == Some(50.0)));
        assert!(!s.synthetic);
    }

    #[test]
    fn out_of_range_is_clamped() {
        let s = smile_series(&input(vec![1.7, -0.2]), 2, 15.0).unwrap();
        assert_eq!(s.values, vec![Some(100.0), Some(0.0)]);
    }

    #[test]
    fn zero_stub_is_flagged() {
        let frames = FrameSequence::new(1, 1, vec![vec![0]; 3], 5.0).unwrap();
        let scores = ZeroSmileProvider.scores(&frames).unwrap();
        let s = smile_series(&scores, frames.len(), frames.frame_rate()).unwrap();
        assert!(s.synthetic);
        assert_eq!(s.values, vec![Some(0.0); 3]);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(smile_series(&input(vec![0.1; 3]), 4, 15.0), Err(Error::Format(_))));
    }
}
