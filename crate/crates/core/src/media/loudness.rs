use serde::{Deserialize, Serialize};

use super::{AudioTrack, BehaviorSeries, Signal};
use crate::{Error, Result};

/// Loudness floor in dBFS (16-bit quantization noise).
pub const SILENCE_FLOOR_DB: f64 = -96.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoudnessParams {
    /// Analysis window, seconds.
    pub window: f64,
    /// Hop between windows, seconds.
    pub hop: f64,
}

impl Default for LoudnessParams {
    fn default() -> Self {
        Self {
            window: 0.040,
            hop: 0.010,
        }
    }
}

/// `20 * log10(rms)` of `samples`, clamped at [`SILENCE_FLOOR_DB`].
pub fn rms_dbfs(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return SILENCE_FLOOR_DB;
    }
    let mean_sq = samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64;
    if mean_sq <= 0.0 {
        return SILENCE_FLOOR_DB;
    }
    // 10*log10(mean square) == 20*log10(rms)
    (10.0 * mean_sq.log10()).max(SILENCE_FLOOR_DB)
}

/// Frame layout shared by the loudness and pitch trackers.
pub(crate) struct FrameGrid {
    pub window: usize,
    pub hop: usize,
    pub count: usize,
}

impl FrameGrid {
    pub fn new(audio: &AudioTrack, window: f64, hop: f64) -> Result<Self> {
        if audio.is_empty() {
            return Err(Error::EmptySeries("audio has no samples".into()));
        }
        if !(hop > 0.0 && window >= hop) {
            return Err(Error::Parameter(format!(
                "need window >= hop > 0, got window {window}, hop {hop}"
            )));
        }
        let rate = audio.sample_rate() as f64;
        let window_len = (window * rate).round() as usize;
        let hop_len = ((hop * rate).round() as usize).max(1);
        let n = audio.samples().len();
        if window_len == 0 || window_len > n {
            return Err(Error::Parameter(format!(
                "window of {window} s does not fit in {:.3} s of audio",
                audio.duration()
            )));
        }
        Ok(Self {
            window: window_len,
            hop: hop_len,
            count: (n - window_len) / hop_len + 1,
        })
    }

    pub fn frame<'a>(&self, samples: &'a [f64], i: usize) -> &'a [f64] {
        let start = i * self.hop;
        &samples[start..start + self.window]
    }

    /// Window centers on the sample clock.
    pub fn times(&self, rate: u32) -> (f64, f64) {
        let rate = rate as f64;
        (self.window as f64 / 2.0 / rate, self.hop as f64 / rate)
    }
}

/// Short-time loudness in dBFS.
pub fn loudness_series(audio: &AudioTrack, params: LoudnessParams) -> Result<BehaviorSeries> {
    let grid = FrameGrid::new(audio, params.window, params.hop)?;
    let values = (0..grid.count)
        .map(|i| Some(rms_dbfs(grid.frame(audio.samples(), i))))
        .collect();
    let (t0, dt) = grid.times(audio.sample_rate());
    Ok(BehaviorSeries::new(Signal::Loudness, t0, dt, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, amp: f64, secs: f64, rate: u32) -> AudioTrack {
        let n = (secs * rate as f64) as usize;
        let s = (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / rate as f64).sin())
            .collect();
        AudioTrack::new(s, rate).unwrap()
    }

    #[test]
    fn silence_sits_on_floor() {
        let a = AudioTrack::new(vec![0.0; 16000], 16000).unwrap();
        let s = loudness_series(&a, LoudnessParams::default()).unwrap();
        assert!(s.values.iter().all(|v| *v == Some(SILENCE_FLOOR_DB)));
    }

    #[test]
    fn full_scale_sine_is_minus_three_db() {
        let a = sine(1000.0, 1.0, 1.0, 16000);
        let s = loudness_series(&a, LoudnessParams::default()).unwrap();
        let expected = 20.0 * (1.0 / 2f64.sqrt()).log10();
        for v in s.present() {
            assert!((v - expected).abs() < 0.05, "{v}");
        }
    }

    #[test]
    fn half_amplitude_is_six_db_down() {
        let full = loudness_series(&sine(1000.0, 1.0, 0.5, 16000), LoudnessParams::default()).unwrap();
        let half = loudness_series(&sine(1000.0, 0.5, 0.5, 16000), LoudnessParams::default()).unwrap();
        for (a, b) in full.present().zip(half.present()) {
            assert!((a - b - 20.0 * 2f64.log10()).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_is_centered() {
        let s = loudness_series(&sine(500.0, 0.3, 1.0, 16000), LoudnessParams::default()).unwrap();
        assert_eq!(s.len(), (16000 - 640) / 160 + 1);
        assert!((s.t0 - 0.02).abs() < 1e-12);
        assert!((s.dt - 0.01).abs() < 1e-12);
    }

    #[test]
    fn empty_audio_rejected() {
        let a = AudioTrack::new(vec![], 16000).unwrap();
        assert!(matches!(
            loudness_series(&a, LoudnessParams::default()),
            Err(Error::EmptySeries(_))
        ));
    }

    #[test]
    fn window_longer_than_audio_rejected() {
        let a = AudioTrack::new(vec![0.1; 100], 16000).unwrap();
        assert!(matches!(
            loudness_series(&a, LoudnessParams::default()),
            Err(Error::Parameter(_))
        ));
    }
}
