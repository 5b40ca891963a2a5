//! Autocorrelation pitch tracking.
//!
//! Each analysis frame is mean-removed and its normalized autocorrelation
//!
//! ```text
//! r(lag) = sum x[i] x[i+lag] / sqrt(sum x[i]^2 * sum x[i+lag]^2)
//! ```
//!
//! is searched for local maxima between `rate / f_max` and `rate / f_min`.
//! Peaks are refined by parabolic interpolation and a small octave cost
//! favors the shortest of near-equal periods, so a pure tone does not
//! report a subharmonic. A frame is voiced when the chosen peak reaches the
//! voicing threshold.

use serde::{Deserialize, Serialize};

use super::loudness::FrameGrid;
use super::{AudioTrack, BehaviorSeries, Signal};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchParams {
    pub window: f64,
    pub hop: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub voicing_threshold: f64,
    /// Strength penalty per octave of period length.
    pub octave_cost: f64,
}

impl Default for PitchParams {
    fn default() -> Self {
        Self {
            window: 0.040,
            hop: 0.010,
            f_min: 75.0,
            f_max: 500.0,
            voicing_threshold: 0.45,
            octave_cost: 0.01,
        }
    }
}

impl PitchParams {
    fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.f_min > 0.0 && self.f_min < self.f_max) {
            return Err(Error::Parameter(format!(
                "pitch band [{}, {}] must satisfy 0 < f_min < f_max",
                self.f_min, self.f_max
            )));
        }
        if self.f_max > nyquist {
            return Err(Error::Parameter(format!(
                "f_max {} exceeds the Nyquist frequency {nyquist}",
                self.f_max
            )));
        }
        if self.window < 2.0 / self.f_min {
            return Err(Error::Parameter(format!(
                "window {} s is shorter than two periods of f_min ({} s)",
                self.window,
                2.0 / self.f_min
            )));
        }
        Ok(())
    }
}

/// Fundamental frequency track in Hz; unvoiced frames are `None`.
pub fn pitch_series(audio: &AudioTrack, params: PitchParams) -> Result<BehaviorSeries> {
    params.validate(audio.sample_rate())?;
    let grid = FrameGrid::new(audio, params.window, params.hop)?;
    let mut tracker = Tracker::new(audio.sample_rate(), grid.window, &params);
    let values = (0..grid.count)
        .map(|i| tracker.estimate(grid.frame(audio.samples(), i)))
        .collect();
    let (t0, dt) = grid.times(audio.sample_rate());
    Ok(BehaviorSeries::new(Signal::Pitch, t0, dt, values))
}

struct Tracker {
    rate: f64,
    min_lag: usize,
    max_lag: usize,
    f_min: f64,
    f_max: f64,
    threshold: f64,
    octave_cost: f64,
    centered: Vec<f64>,
    energy_prefix: Vec<f64>,
    corr: Vec<f64>,
}

impl Tracker {
    fn new(sample_rate: u32, window: usize, params: &PitchParams) -> Self {
        let rate = sample_rate as f64;
        let min_lag = ((rate / params.f_max).floor() as usize).max(2);
        // one extra lag on each side for the parabola
        let max_lag = ((rate / params.f_min).ceil() as usize).min(window.saturating_sub(2));
        Self {
            rate,
            min_lag,
            max_lag,
            f_min: params.f_min,
            f_max: params.f_max,
            threshold: params.voicing_threshold,
            octave_cost: params.octave_cost,
            centered: vec![0.0; window],
            energy_prefix: vec![0.0; window + 1],
            corr: vec![0.0; max_lag + 2],
        }
    }

    fn estimate(&mut self, frame: &[f64]) -> Option<f64> {
        let n = frame.len();
        let mean = frame.iter().sum::<f64>() / n as f64;
        for (c, &s) in self.centered.iter_mut().zip(frame) {
            *c = s - mean;
        }
        for i in 0..n {
            self.energy_prefix[i + 1] = self.energy_prefix[i] + self.centered[i] * self.centered[i];
        }
        if self.energy_prefix[n] <= 0.0 || self.max_lag < self.min_lag {
            return None;
        }

        let x = &self.centered;
        for lag in self.min_lag - 1..=self.max_lag + 1 {
            let head = self.energy_prefix[n - lag];
            let tail = self.energy_prefix[n] - self.energy_prefix[lag];
            let denom = (head * tail).sqrt();
            self.corr[lag] = if denom > 0.0 {
                let dot: f64 = x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum();
                dot / denom
            } else {
                0.0
            };
        }

        let mut best: Option<(f64, f64, f64)> = None; // (strength, peak, lag)
        for lag in self.min_lag..=self.max_lag {
            let (a, b, c) = (self.corr[lag - 1], self.corr[lag], self.corr[lag + 1]);
            if !(b >= a && b > c) || b <= 0.0 {
                continue;
            }
            let curvature = a - 2.0 * b + c;
            let (offset, peak) = if curvature < 0.0 {
                let offset = 0.5 * (a - c) / curvature;
                (offset, b - 0.25 * (a - c) * offset)
            } else {
                (0.0, b)
            };
            let refined = lag as f64 + offset;
            let strength = peak - self.octave_cost * (self.f_min * refined / self.rate).log2();
            if best.is_none_or(|(s, _, _)| strength > s) {
                best = Some((strength, peak, refined));
            }
        }

        let (_, peak, lag) = best?;
        if peak < self.threshold {
            return None;
        }
        Some((self.rate / lag).clamp(self.f_min, self.f_max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, amp: f64, secs: f64) -> AudioTrack {
        let rate = 16000;
        let n = (secs * rate as f64) as usize;
        let s = (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / rate as f64).sin())
            .collect();
        AudioTrack::new(s, rate).unwrap()
    }

    /// Frequency from counting upward zero crossings over the whole signal.
    fn zero_crossing_frequency(audio: &AudioTrack) -> f64 {
        let s = audio.samples();
        let ups: Vec<f64> = (1..s.len())
            .filter(|&i| s[i - 1] < 0.0 && s[i] >= 0.0)
            .map(|i| {
                // linear interpolation of the crossing instant
                let frac = -s[i - 1] / (s[i] - s[i - 1]);
                (i - 1) as f64 + frac
            })
            .collect();
        let periods = (ups.len() - 1) as f64;
        audio.sample_rate() as f64 * periods / (ups[ups.len() - 1] - ups[0])
    }

    #[test]
    fn pure_tone_matches_zero_crossing_oracle() {
        let audio = tone(220.0, 0.8, 1.0);
        let oracle = zero_crossing_frequency(&audio);
        assert!((oracle - 220.0).abs() < 0.01);
        let s = pitch_series(&audio, PitchParams::default()).unwrap();
        let voiced: Vec<f64> = s.present().collect();
        assert_eq!(voiced.len(), s.len());
        for f in voiced {
            assert!((f - oracle).abs() <= 2.0, "{f}");
        }
    }

    #[test]
    fn amplitude_does_not_move_pitch() {
        let loud = pitch_series(&tone(180.0, 0.9, 0.3), PitchParams::default()).unwrap();
        let quiet = pitch_series(&tone(180.0, 0.05, 0.3), PitchParams::default()).unwrap();
        for (a, b) in loud.values.iter().zip(&quiet.values) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn silence_is_unvoiced() {
        let a = AudioTrack::new(vec![0.0; 8000], 16000).unwrap();
        let s = pitch_series(&a, PitchParams::default()).unwrap();
        assert!(s.values.iter().all(Option::is_none));
    }

    #[test]
    fn band_above_nyquist_rejected() {
        let a = tone(220.0, 0.5, 0.5);
        let params = PitchParams {
            f_max: 9000.0,
            ..Default::default()
        };
        assert!(matches!(pitch_series(&a, params), Err(Error::Parameter(_))));
    }

    #[test]
    fn short_window_rejected() {
        let a = tone(220.0, 0.5, 0.5);
        let params = PitchParams {
            window: 0.02,
            hop: 0.01,
            ..Default::default()
        };
        assert!(matches!(pitch_series(&a, params), Err(Error::Parameter(_))));
    }
}
