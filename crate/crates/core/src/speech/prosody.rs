use serde::{Deserialize, Serialize};

use super::{TimedTranscript, WordToken};
use crate::media::{rms_dbfs, AudioTrack};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordProsody {
    pub token: WordToken,
    /// Seconds, `end - start`.
    pub duration: f64,
    /// dBFS over the samples inside the word; `None` when the word covers no samples.
    pub mean_loudness: Option<f64>,
    /// The word extends past the end of the audio.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub beyond_audio: bool,
}

/// Duration and loudness of each aligned word. Loudness uses the same
/// RMS-to-dBFS rule as the loudness track, over samples `[start, end)`.
pub fn word_prosody(transcript: &TimedTranscript, audio: &AudioTrack) -> Vec<WordProsody> {
    let rate = audio.sample_rate() as f64;
    let samples = audio.samples();
    transcript
        .words()
        .iter()
        .map(|w| {
            let first = ((w.start * rate).round() as usize).min(samples.len());
            let last = ((w.end * rate).round() as usize).min(samples.len());
            let mean_loudness = (last > first).then(|| rms_dbfs(&samples[first..last]));
            WordProsody {
                token: w.clone(),
                duration: w.end - w.start,
                mean_loudness,
                beyond_audio: w.end > audio.duration(),
            }
        })
        .collect()
}
