//! From media inputs and peer feedback to a [`FeedbackBundle`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bundle::{
    summarize_ratings, AutomatedFeedback, FeedbackBundle, FeedbackSummary, HeadlineMetrics, PeerFeedback, Playback,
    QualitySummary, TranscriptSection, WordCount, BUNDLE_SCHEMA_VERSION,
};
use crate::formats;
use crate::media::{
    loudness_series, movement_series, pitch_series, smile_series, AudioTrack, BehaviorSeries, FrameSequence,
    LoudnessParams, PitchParams, Signal, SmileProvider, SmileProviderInput, ZeroSmileProvider,
};
use crate::moderation::{rank_comments, Moderator, Sentiment};
use crate::speech::{detect_fillers, unique_word_ratio, word_frequencies, word_prosody, TimedTranscript, WordList};
use crate::workflow::Condition;
use crate::{Error, Result};

/// Intensity change below which a pixel difference counts as sensor noise.
pub const DEFAULT_MOVEMENT_THRESHOLD: u8 = 0;

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub loudness: LoudnessParams,
    pub pitch: PitchParams,
    pub movement_threshold: u8,
    /// Word-cloud size.
    pub top_words: usize,
    /// Comments in the highlighted ranked section.
    pub top_comments: usize,
    pub fillers: WordList,
    pub stopwords: WordList,
    pub max_audio_secs: f64,
    pub max_frame_rate: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            loudness: LoudnessParams::default(),
            pitch: PitchParams::default(),
            movement_threshold: DEFAULT_MOVEMENT_THRESHOLD,
            top_words: 50,
            top_comments: 3,
            fillers: WordList::default_fillers(),
            stopwords: WordList::default_stopwords(),
            max_audio_secs: 180.0,
            max_frame_rate: 15.0,
        }
    }
}

/// Demuxed media for one submission.
#[derive(Debug, Clone)]
pub struct MediaInputs {
    pub audio: AudioTrack,
    pub frames: FrameSequence,
    pub transcript: TimedTranscript,
    /// Detector scores; without them smile is a flagged all-zero series.
    pub smile: Option<SmileProviderInput>,
}

impl MediaInputs {
    /// Enforces the configured size limits.
    pub fn check_limits(&self, config: &AnalysisConfig) -> Result<()> {
        if self.audio.duration() > config.max_audio_secs {
            return Err(Error::Format(format!(
                "wav: {:.1} s exceeds the {} s limit",
                self.audio.duration(),
                config.max_audio_secs
            )));
        }
        if self.frames.frame_rate() > config.max_frame_rate {
            return Err(Error::Format(format!(
                "frames: {} fps exceeds the {} fps limit",
                self.frames.frame_rate(),
                config.max_frame_rate
            )));
        }
        Ok(())
    }
}

pub fn analyze_media(inputs: &MediaInputs, config: &AnalysisConfig) -> Result<AutomatedFeedback> {
    inputs.check_limits(config)?;
    let smile_input = match &inputs.smile {
        Some(s) => s.clone(),
        None => ZeroSmileProvider.scores(&inputs.frames)?,
    };
    let series = vec![
        smile_series(&smile_input, inputs.frames.len(), inputs.frames.frame_rate())?,
        movement_series(&inputs.frames, config.movement_threshold)?,
        loudness_series(&inputs.audio, config.loudness)?,
        pitch_series(&inputs.audio, config.pitch)?,
    ];
    let transcript = &inputs.transcript;
    Ok(AutomatedFeedback {
        series,
        transcript: TranscriptSection {
            language_tag: transcript.language_tag().to_string(),
            words: transcript.words().to_vec(),
        },
        unique_words: unique_word_ratio(transcript),
        word_frequencies: word_frequencies(transcript, &config.stopwords, config.top_words)
            .into_iter()
            .map(|(word, count)| WordCount { word, count })
            .collect(),
        fillers: detect_fillers(transcript, &config.fillers),
        word_prosody: word_prosody(transcript, &inputs.audio),
    })
}

/// What a bundle is assembled from.
#[derive(Debug, Clone, Copy)]
pub struct BundleInputs<'a> {
    pub video_id: &'a str,
    pub condition: Condition,
    pub media_ref: Option<&'a str>,
    pub duration: f64,
    pub feedback: &'a PeerFeedback,
    /// Required for treatment bundles.
    pub automated: Option<&'a AutomatedFeedback>,
    /// Required for treatment bundles.
    pub moderator: Option<&'a Moderator>,
}

/// Builds the owner-facing bundle. Reviewer ids never survive.
pub fn assemble_bundle(inputs: BundleInputs<'_>, config: &AnalysisConfig) -> Result<FeedbackBundle> {
    let feedback = inputs.feedback;
    let mut comments = feedback.comments.clone();
    comments.sort_by(|a, b| a.created_at.cmp(&b.created_at));
    let ratings_summary = summarize_ratings(&feedback.qualities, &feedback.ratings);
    let overall = QualitySummary {
        quality: "overall".into(),
        mean: (!feedback.overall.is_empty())
            .then(|| feedback.overall.iter().map(|&s| s as f64).sum::<f64>() / feedback.overall.len() as f64),
        count: feedback.overall.len(),
    };

    let mut bundle = FeedbackBundle {
        schema_version: BUNDLE_SCHEMA_VERSION,
        video_id: inputs.video_id.to_string(),
        condition: inputs.condition,
        playback: Playback {
            media_ref: inputs.media_ref.map(str::to_string),
            duration: inputs.duration,
        },
        qualities: feedback.qualities.clone(),
        comments,
        ratings: feedback.ratings.clone(),
        ratings_summary,
        overall,
        automated: None,
        ranked_comments: None,
        summary: None,
    };

    if inputs.condition == Condition::Treatment {
        let automated = inputs
            .automated
            .ok_or_else(|| Error::NotFound(format!("automated analysis for video {}", inputs.video_id)))?;
        let moderator = inputs
            .moderator
            .ok_or_else(|| Error::NotFound("moderation models".into()))?;
        let series: BTreeMap<Signal, BehaviorSeries> =
            automated.series.iter().map(|s| (s.signal, s.clone())).collect();
        let scored = bundle
            .comments
            .iter()
            .map(|c| moderator.score(c, &series))
            .collect::<Result<Vec<_>>>()?;
        let ranked = rank_comments(scored, config.top_comments);
        let pick = |want: Sentiment| ranked.iter().find(|s| s.sentiment == want).cloned();
        bundle.summary = Some(FeedbackSummary {
            quality_means: bundle.ratings_summary.clone(),
            headline: headline(automated, inputs.duration),
            top_positive: pick(Sentiment::Positive),
            top_negative: pick(Sentiment::Negative),
        });
        bundle.ranked_comments = Some(ranked);
        bundle.automated = Some(automated.clone());
    }
    bundle.strip_reviewer_ids();
    Ok(bundle)
}

fn present_mean(series: &[BehaviorSeries], signal: Signal) -> Option<f64> {
    let s = series.iter().find(|s| s.signal == signal)?;
    let (sum, n) = s.present().fold((0.0, 0usize), |(sum, n), v| (sum + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn headline(automated: &AutomatedFeedback, duration: f64) -> HeadlineMetrics {
    let series = &automated.series;
    let voiced_fraction = series
        .iter()
        .find(|s| s.signal == Signal::Pitch)
        .filter(|s| !s.is_empty())
        .map(|s| s.present().count() as f64 / s.len() as f64);
    HeadlineMetrics {
        mean_smile: present_mean(series, Signal::Smile),
        mean_movement: present_mean(series, Signal::Movement),
        mean_loudness_db: present_mean(series, Signal::Loudness),
        mean_pitch_hz: present_mean(series, Signal::Pitch),
        voiced_fraction,
        unique_word_ratio: automated.unique_words.ratio,
        filler_count: automated.fillers.len(),
        words_per_minute: (duration > 0.0).then(|| automated.transcript.words.len() as f64 * 60.0 / duration),
    }
}

pub const SUBMISSION_SCHEMA_VERSION: u32 = 1;

/// `submission.json` in a submission directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionManifest {
    pub schema_version: u32,
    pub video_id: String,
    pub condition: Condition,
    #[serde(default)]
    pub title: String,
    pub qualities: Vec<String>,
}

/// Files making up a submission directory.
pub mod layout {
    pub const MANIFEST: &str = "submission.json";
    pub const AUDIO: &str = "audio.wav";
    pub const FRAMES: &str = "frames";
    pub const TRANSCRIPT: &str = "transcript.json";
    pub const SMILE: &str = "smile.txt";
    pub const FEEDBACK: &str = "feedback.json";
    pub const MODELS: &str = "models";
}

/// Loads the media of a submission directory.
pub fn load_media(dir: &Path) -> Result<MediaInputs> {
    let smile_path = dir.join(layout::SMILE);
    let smile = if smile_path.exists() {
        Some(formats::parse_smile_sidecar(&fs::read_to_string(smile_path)?)?)
    } else {
        None
    };
    Ok(MediaInputs {
        audio: formats::read_wav_file(&dir.join(layout::AUDIO))?,
        frames: formats::read_frames_dir(&dir.join(layout::FRAMES))?,
        transcript: formats::parse_transcript(&fs::read_to_string(dir.join(layout::TRANSCRIPT))?)?,
        smile,
    })
}

/// Runs the whole pipeline over a submission directory:
///
/// ```text
/// submission.json   video id, condition, selected qualities
/// audio.wav         16-bit PCM
/// frames/           *.pgm + manifest.json
/// transcript.json   timed words
/// smile.txt         optional detector scores
/// feedback.json     optional peer comments and ratings
/// models/           moderation models (treatment only)
/// ```
pub fn analyze_submission_dir(dir: &Path, config: &AnalysisConfig) -> Result<FeedbackBundle> {
    let manifest: SubmissionManifest = serde_json::from_slice(&fs::read(dir.join(layout::MANIFEST))?)?;
    if manifest.schema_version != SUBMISSION_SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            expected: SUBMISSION_SCHEMA_VERSION,
            found: manifest.schema_version,
        });
    }
    let media = load_media(dir)?;
    let feedback_path = dir.join(layout::FEEDBACK);
    let mut feedback: PeerFeedback = if feedback_path.exists() {
        serde_json::from_slice(&fs::read(feedback_path)?)?
    } else {
        PeerFeedback::default()
    };
    feedback.qualities = manifest.qualities.clone();
    let automated = analyze_media(&media, config)?;
    let moderator = match manifest.condition {
        Condition::Treatment => Some(Moderator::load(&dir.join(layout::MODELS))?),
        Condition::Control => None,
    };
    assemble_bundle(
        BundleInputs {
            video_id: &manifest.video_id,
            condition: manifest.condition,
            media_ref: Some(layout::AUDIO),
            duration: media.audio.duration(),
            feedback: &feedback,
            automated: Some(&automated),
            moderator: moderator.as_ref(),
        },
        config,
    )
}
