//! Automated behavioral time series: smile, movement, loudness and pitch.
//!
//! Every extractor is a pure function over immutable inputs and returns a
//! [`BehaviorSeries`] sampled on a uniform grid `t0 + i * dt`.

mod loudness;
mod movement;
mod pitch;
mod smile;
mod window;

pub use loudness::{loudness_series, rms_dbfs, LoudnessParams, SILENCE_FLOOR_DB};
pub use movement::movement_series;
pub use pitch::{pitch_series, PitchParams};
pub use smile::{smile_series, SidecarSmileProvider, SmileProvider, SmileProviderInput, ZeroSmileProvider};
pub use window::{sample_window, WindowStats};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mono PCM audio with samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioTrack {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioTrack {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Parameter("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !(-1.0..=1.0).contains(s)) {
            return Err(Error::Format(format!(
                "sample {i} = {} outside [-1, 1]",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// 8-bit grayscale frames sharing one raster size.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    width: usize,
    height: usize,
    frames: Vec<Vec<u8>>,
    frame_rate: f64,
}

impl FrameSequence {
    /// Frames are row-major `width * height` intensity buffers.
    pub fn new(width: usize, height: usize, frames: Vec<Vec<u8>>, frame_rate: f64) -> Result<Self> {
        if !(frame_rate > 0.0 && frame_rate.is_finite()) {
            return Err(Error::Parameter(format!("frame rate {frame_rate} must be positive")));
        }
        let expected = width * height;
        if let Some(i) = frames.iter().position(|f| f.len() != expected) {
            return Err(Error::Format(format!(
                "frame {i} has {} pixels, expected {width}x{height}",
                frames[i].len()
            )));
        }
        Ok(Self {
            width,
            height,
            frames,
            frame_rate,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn frames(&self) -> &[Vec<u8>] {
        &self.frames
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Smile,
    Movement,
    Loudness,
    Pitch,
}

impl Signal {
    pub const ALL: [Signal; 4] = [Signal::Smile, Signal::Movement, Signal::Loudness, Signal::Pitch];

    pub fn name(self) -> &'static str {
        match self {
            Signal::Smile => "smile",
            Signal::Movement => "movement",
            Signal::Loudness => "loudness",
            Signal::Pitch => "pitch",
        }
    }
}

/// A uniformly sampled signal. `None` marks an absent sample (unvoiced pitch).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorSeries {
    pub signal: Signal,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<Option<f64>>,
    /// Set when the values come from a stub rather than a real detector.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub synthetic: bool,
}

impl BehaviorSeries {
    pub fn new(signal: Signal, t0: f64, dt: f64, values: Vec<Option<f64>>) -> Self {
        debug_assert!(dt > 0.0);
        Self {
            signal,
            t0,
            dt,
            values,
            synthetic: false,
        }
    }

    /// Timestamp of sample `i`.
    pub fn time_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Present values only.
    pub fn present(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().filter_map(|v| *v)
    }
}
