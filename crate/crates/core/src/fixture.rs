//! Deterministic synthetic submissions for demos and end-to-end tests.
//!
//! [`FixtureSubmission::generate`] builds 30 s of voiced 16 kHz audio, 150
//! grayscale frames at 5 fps, an 80-word timed transcript with filler
//! words, smile detector scores, 6 peer comments with ratings, and a labeled
//! moderation training set. Everything derives from the seed.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{PeerFeedback, RatingEntry};
use crate::formats;
use crate::media::{AudioTrack, FrameSequence, SmileProviderInput};
use crate::moderation::{train_moderation, write_training_csv, Category, Comment, Sentiment, TrainingRow};
use crate::pipeline::{layout, MediaInputs, SubmissionManifest, SUBMISSION_SCHEMA_VERSION};
use crate::speech::{TimedTranscript, WordToken};
use crate::workflow::Condition;
use crate::Result;

pub const FIXTURE_SEED: u64 = 20;
pub const SAMPLE_RATE: u32 = 16_000;
pub const DURATION_SECS: f64 = 30.0;
pub const FRAME_RATE: f64 = 5.0;
pub const FRAME_COUNT: usize = 150;
pub const FRAME_WIDTH: usize = 64;
pub const FRAME_HEIGHT: usize = 48;
pub const WORD_COUNT: usize = 80;

/// Ten phrases of 2.4 s separated by 0.6 s pauses.
const PHRASES: usize = 10;
const PHRASE_SECS: f64 = 2.4;
const PHRASE_STRIDE: f64 = 3.0;

const VOCABULARY: &[&str] = &[
    "I", "enjoy", "building", "software", "that", "helps", "people", "learn", "my", "team", "worked", "on",
    "a", "project", "where", "we", "measured", "progress", "every", "week", "and", "shared", "results",
    "with", "our", "users", "because", "feedback", "matters", "to", "me", "most",
];

const FILLER_SLOTS: &[(usize, &str)] = &[(3, "um"), (17, "like"), (30, "uh"), (44, "you"), (45, "know"), (62, "um")];

pub const FIXTURE_QUALITIES: [&str; 5] = ["eye contact", "pacing", "vocal variety", "avoiding filler words", "confidence"];

#[derive(Debug, Clone)]
pub struct FixtureSubmission {
    pub manifest: SubmissionManifest,
    pub media: MediaInputs,
    pub feedback: PeerFeedback,
    pub training: Vec<TrainingRow>,
}

impl FixtureSubmission {
    pub fn generate(seed: u64, condition: Condition) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let media = MediaInputs {
            audio: audio(&mut rng)?,
            frames: frames()?,
            transcript: transcript(&mut rng)?,
            smile: Some(smile()),
        };
        Ok(Self {
            manifest: SubmissionManifest {
                schema_version: SUBMISSION_SCHEMA_VERSION,
                video_id: "fixture-video".into(),
                condition,
                title: "Tell me about yourself".into(),
                qualities: FIXTURE_QUALITIES.iter().map(|q| q.to_string()).collect(),
            },
            media,
            feedback: feedback(),
            training: training_rows(&mut rng),
        })
    }

    /// Writes the submission directory read by `analyze`, including trained
    /// moderation models and the training CSV they came from.
    pub fn write(&self, dir: &Path, seed: u64) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(
            dir.join(layout::MANIFEST),
            serde_json::to_string_pretty(&self.manifest)? + "\n",
        )?;
        formats::write_wav_file(&dir.join(layout::AUDIO), &self.media.audio)?;
        formats::write_frames_dir(&dir.join(layout::FRAMES), &self.media.frames)?;
        fs::write(
            dir.join(layout::TRANSCRIPT),
            formats::write_transcript(&self.media.transcript)?,
        )?;
        if let Some(smile) = &self.media.smile {
            fs::write(dir.join(layout::SMILE), formats::write_smile_sidecar(smile))?;
        }
        fs::write(
            dir.join(layout::FEEDBACK),
            serde_json::to_string_pretty(&self.feedback)? + "\n",
        )?;
        let mut csv = Vec::new();
        write_training_csv(&mut csv, &self.training)?;
        fs::write(dir.join("training.csv"), csv)?;
        train_moderation(&self.training, &|_| None, seed)?.write(&dir.join(layout::MODELS))?;
        Ok(())
    }
}

fn phrase_start(k: usize) -> f64 {
    0.3 + k as f64 * PHRASE_STRIDE
}

fn audio(rng: &mut ChaCha8Rng) -> Result<AudioTrack> {
    let n = (DURATION_SECS * SAMPLE_RATE as f64) as usize;
    let rate = SAMPLE_RATE as f64;
    let mut phase = 0.0f64;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / rate;
        let f0 = 150.0 + 40.0 * (TAU * 0.3 * t).sin();
        phase = (phase + TAU * f0 / rate) % TAU;
        let envelope = (0..PHRASES)
            .map(|k| {
                let u = (t - phrase_start(k)) / PHRASE_SECS;
                if (0.0..1.0).contains(&u) {
                    // raised-cosine edges over the first and last 5%
                    let edge = (u.min(1.0 - u) / 0.05).min(1.0);
                    0.5 - 0.5 * (std::f64::consts::PI * edge).cos()
                } else {
                    0.0
                }
            })
            .sum::<f64>();
        let loudness = 0.35 + 0.15 * (TAU * t / 7.0).sin();
        let voiced = (phase.sin() + 0.5 * (2.0 * phase).sin() + 0.25 * (3.0 * phase).sin()) / 1.75;
        let noise = rng.random_range(-0.002..0.002);
        samples.push((loudness * envelope * voiced + noise).clamp(-1.0, 1.0));
    }
    AudioTrack::new(samples, SAMPLE_RATE)
}

fn frames() -> Result<FrameSequence> {
    let mut out = Vec::with_capacity(FRAME_COUNT);
    for f in 0..FRAME_COUNT {
        let t = f as f64 / FRAME_RATE;
        let cx = 32.0 + 18.0 * (TAU * t / 6.0).sin();
        let cy = 24.0 + 6.0 * (TAU * t / 4.0).sin();
        let mut frame = vec![0u8; FRAME_WIDTH * FRAME_HEIGHT];
        for y in 0..FRAME_HEIGHT {
            for x in 0..FRAME_WIDTH {
                let inside = (x as f64 - cx).abs() < 7.0 && (y as f64 - cy).abs() < 9.0;
                frame[y * FRAME_WIDTH + x] = if inside { 220 } else { (40 + x + y) as u8 };
            }
        }
        out.push(frame);
    }
    FrameSequence::new(FRAME_WIDTH, FRAME_HEIGHT, out, FRAME_RATE)
}

fn smile() -> SmileProviderInput {
    let scores = (0..FRAME_COUNT)
        .map(|f| {
            let t = f as f64 / FRAME_RATE;
            ((0.5 + 0.4 * (TAU * t / 10.0).sin()) * 1000.0).round() / 1000.0
        })
        .collect();
    SmileProviderInput {
        scores,
        range: (0.0, 1.0),
        synthetic: false,
    }
}

fn ms(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn transcript(rng: &mut ChaCha8Rng) -> Result<TimedTranscript> {
    let per_phrase = WORD_COUNT / PHRASES;
    let slot = PHRASE_SECS / per_phrase as f64;
    let mut words = Vec::with_capacity(WORD_COUNT);
    for i in 0..WORD_COUNT {
        let start = phrase_start(i / per_phrase) + (i % per_phrase) as f64 * slot;
        let text = match FILLER_SLOTS.iter().find(|(at, _)| *at == i) {
            Some((_, filler)) => filler.to_string(),
            None => VOCABULARY[rng.random_range(0..VOCABULARY.len())].to_string(),
        };
        let text = if i % per_phrase == per_phrase - 1 { format!("{text}.") } else { text };
        words.push(WordToken {
            text,
            start: ms(start),
            end: ms(start + slot * 0.85),
            confidence: (rng.random_range(70..=100) as f64) / 100.0,
        });
    }
    TimedTranscript::new(words, "en-US")
}

fn feedback() -> PeerFeedback {
    let comments: [(&str, &str, Category, Option<f64>, i64); 6] = [
        ("alice", "Great eye contact throughout, you looked confident.", Category::Friendliness, Some(2.0), 100),
        ("alice", "You said um a few times near the start, try pausing instead.", Category::Speech, Some(1.1), 100),
        ("alice", "Your hand gestures were distracting around the middle.", Category::Movement, Some(14.5), 100),
        ("bob", "Nice warm smile, very friendly opening.", Category::Friendliness, Some(0.5), 200),
        ("bob", "Too fast in the second half, slow down and breathe.", Category::Speech, Some(21.0), 200),
        ("bob", "Good posture.", Category::Movement, None, 200),
    ];
    let comments = comments
        .iter()
        .enumerate()
        .map(|(i, (author, text, category, ts, at))| Comment {
            id: format!("fixture-c{}", i + 1),
            video_id: "fixture-video".into(),
            author_id: Some(author.to_string()),
            text: text.to_string(),
            category: *category,
            video_timestamp: *ts,
            created_at: *at,
        })
        .collect();
    let stars: [(&str, [u8; 5], u8); 2] = [("alice", [5, 4, 3, 2, 4], 4), ("bob", [4, 3, 4, 3, 5], 4)];
    let mut ratings = Vec::new();
    let mut overall = Vec::new();
    for (rater, values, o) in stars {
        for (q, s) in FIXTURE_QUALITIES.iter().zip(values) {
            ratings.push(RatingEntry {
                rater_id: Some(rater.into()),
                quality: q.to_string(),
                stars: s,
            });
        }
        overall.push(o);
    }
    PeerFeedback {
        qualities: FIXTURE_QUALITIES.iter().map(|q| q.to_string()).collect(),
        comments,
        ratings,
        overall,
    }
}

const POSITIVE: &[(&str, Category)] = &[
    ("great eye contact", Category::Friendliness),
    ("warm friendly smile", Category::Friendliness),
    ("nice energy and enthusiasm", Category::Friendliness),
    ("clear steady pacing", Category::Speech),
    ("good vocal variety", Category::Speech),
    ("excellent explanation of the concept", Category::Speech),
    ("confident relaxed posture", Category::Movement),
    ("natural hand gestures", Category::Movement),
    ("good use of the space", Category::Movement),
];

const NEGATIVE: &[(&str, Category)] = &[
    ("too many filler words", Category::Speech),
    ("speaking too fast", Category::Speech),
    ("monotone and hard to hear", Category::Speech),
    ("avoid looking down at notes", Category::Friendliness),
    ("seemed nervous and distant", Category::Friendliness),
    ("rarely smiled", Category::Friendliness),
    ("stiff posture", Category::Movement),
    ("distracting fidgeting", Category::Movement),
    ("hand gestures were distracting", Category::Movement),
    ("swaying side to side", Category::Movement),
];

const DETAILS: &[&str] = &[
    "",
    "in the opening",
    "when you described your project",
    "near the end, try to keep it consistent",
    "during the second example, it made the point land",
    "throughout the video",
];

/// Labeled comments: helpfulness grows with specificity (detail length and
/// a timestamp); sentiment follows the phrase list it came from.
fn training_rows(rng: &mut ChaCha8Rng) -> Vec<TrainingRow> {
    let mut rows = Vec::new();
    for i in 0..240 {
        let positive = i % 2 == 0;
        let pool = if positive { POSITIVE } else { NEGATIVE };
        let (phrase, category) = pool[rng.random_range(0..pool.len())];
        let detail = DETAILS[rng.random_range(0..DETAILS.len())];
        let text = if detail.is_empty() {
            format!("{phrase}.")
        } else {
            format!("{phrase} {detail}.")
        };
        let timestamp = rng.random_bool(0.6).then(|| ms(rng.random_range(0.0..DURATION_SECS)));
        let words = text.split_whitespace().count() as f64;
        let score = (12.0 + 2.0 * words + if timestamp.is_some() { 5.0 } else { 0.0 } + rng.random_range(-3.0..3.0))
            .round()
            .clamp(10.0, 50.0);
        rows.push(TrainingRow {
            comment_id: format!("t{i:03}"),
            video_id: format!("train-v{}", i % 12),
            text,
            category,
            timestamp,
            score: Some(score),
            sentiment: Some(if positive { Sentiment::Positive } else { Sentiment::Negative }),
        });
    }
    rows
}
