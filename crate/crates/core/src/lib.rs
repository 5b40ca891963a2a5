//! Behavioral feedback for recorded speaking practice.
//!
//! The crate is organized around the pieces of a peer-reviewed practice loop:
//!
//! - [`media`]: smile, movement, loudness and pitch time series from
//!   pre-demuxed audio and grayscale frames.
//! - [`speech`]: transcript analytics (unique-word ratio, word cloud
//!   frequencies, filler words, per-word prosody).
//! - [`moderation`]: comment helpfulness regression, tf-idf Naive Bayes
//!   sentiment and comment ranking.
//! - [`workflow`]: the gated prompt/upload/review state machine.
//! - [`stats`]: Krippendorff's alpha, paired t-test, effect sizes and
//!   rating trajectories over rating exports.
//! - [`bundle`] and [`pipeline`]: the feedback document shared by the CLI,
//!   the HTTP service and the web client.
//!
//! Runnable walkthroughs for each area live in `examples/`.

pub mod bundle;
pub mod error;
pub mod fixture;
pub mod formats;
pub mod media;
pub mod moderation;
pub mod pipeline;
pub mod speech;
pub mod stats;
pub mod workflow;

pub use error::{Error, Result};
