//! The gated practice protocol.
//!
//! State is event sourced: every command validates against the current
//! state, appends one [`EventRecord`] and applies it. [`Workflow::replay`]
//! rebuilds identical state from a log, which is what the service persists.

mod config;
mod gate;

pub use config::{GateMode, Prompt, WorkflowConfig, DEFAULT_PROMPTS, DEFAULT_QUALITIES, TWO_DAYS};
pub use gate::{GateDecision, GateReason};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bundle::{FeedbackBundle, PeerFeedback, RatingEntry};
use crate::moderation::{Category, Comment};
use crate::stats::RatingRow;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Treatment,
    Control,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Treatment => "treatment",
            Condition::Control => "control",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "treatment" => Ok(Condition::Treatment),
            "control" => Ok(Condition::Control),
            other => Err(Error::Format(format!("unknown condition {other:?}"))),
        }
    }
}

/// A comment as typed by a reviewer, before ids and authorship are attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentDraft {
    pub text: String,
    pub category: Category,
    #[serde(default)]
    pub video_timestamp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventPayload {
    UserRegistered {
        user_id: String,
        condition: Condition,
        #[serde(default)]
        token_sha256: Option<String>,
    },
    PromptRelease {
        index: u32,
    },
    Upload {
        video_id: String,
        owner: String,
        prompt_index: u32,
        title: String,
        description: String,
        qualities: Vec<String>,
        /// Stored media references, by role (`audio`, `frames`, ...).
        #[serde(default)]
        media: BTreeMap<String, String>,
    },
    AnalysisCompleted {
        video_id: String,
    },
    /// An accepted review. Its ratings and the owner notification are part of
    /// the same record so they can never be applied separately.
    Review {
        review_id: String,
        reviewer: String,
        video_id: String,
        comments: Vec<CommentDraft>,
        ratings: BTreeMap<String, u8>,
        overall: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    /// Unix seconds; never decreases along the log.
    pub timestamp: i64,
    #[serde(flatten)]
    pub event: EventPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Video {
    pub video_id: String,
    pub owner: String,
    pub prompt_index: u32,
    pub title: String,
    pub description: String,
    pub qualities: Vec<String>,
    pub uploaded_at: i64,
    pub seq: u64,
    pub media: BTreeMap<String, String>,
    /// Analysis finished; the video is visible in peer feeds.
    pub ready: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub review_id: String,
    pub reviewer: String,
    pub video_id: String,
    pub comments: Vec<Comment>,
    pub ratings: BTreeMap<String, u8>,
    pub overall: u8,
    pub submitted_at: i64,
    /// First accepted review of this video by this reviewer.
    pub counted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Notification {
    pub id: String,
    pub user_id: String,
    pub video_id: String,
    pub message: String,
    pub created_at: i64,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct UserRecord {
    condition: Option<Condition>,
    token_sha256: Option<String>,
    reviewed: BTreeSet<String>,
    /// Times of reviews that counted toward progress, in log order.
    counted_reviews: Vec<i64>,
    uploads: BTreeMap<u32, Vec<String>>,
}

/// Read-only view of one participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserState {
    pub user_id: String,
    pub condition: Condition,
    /// Distinct peer videos reviewed.
    pub reviews_completed: usize,
    pub uploads: BTreeMap<u32, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSummary {
    pub video_id: String,
    /// Stable per-viewer pseudonym of the owner.
    pub owner: String,
    pub prompt_index: u32,
    pub title: String,
    pub description: String,
    pub qualities: Vec<String>,
    pub uploaded_at: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UploadRequest {
    pub owner: String,
    /// Defaults to the most recently released prompt.
    pub prompt_index: Option<u32>,
    pub title: String,
    pub description: String,
    pub qualities: Vec<String>,
    pub media: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UploadOutcome {
    Accepted { video_id: String, prompt_index: u32 },
    GateClosed { prompt_index: u32, reasons: Vec<GateReason>, reason: String },
    InvalidQualities { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewSubmission {
    pub reviewer: String,
    pub video_id: String,
    pub comments: Vec<CommentDraft>,
    /// Stars (1-5) per selected quality.
    pub ratings: BTreeMap<String, u8>,
    /// Overall stars; defaults to the rounded mean of the quality ratings.
    pub overall: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReviewOutcome {
    Accepted {
        review_id: String,
        /// False when the reviewer had already reviewed this video.
        counted: bool,
        progress: usize,
    },
    Rejected {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub user_id: String,
    pub mean_rating: f64,
    pub ratings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    /// Ratings submitted after this instant wait for the next refresh.
    pub refreshed_at: i64,
    pub entries: Vec<LeaderboardEntry>,
}

/// Per-viewer pseudonym for a video owner.
pub fn pseudonym(viewer: &str, owner: &str) -> String {
    let digest = Sha256::new()
        .chain_update(viewer.as_bytes())
        .chain_update([0u8])
        .chain_update(owner.as_bytes())
        .finalize();
    let tag: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    format!("peer-{tag}")
}

/// Removes every reviewer identity from an owner-facing bundle.
pub fn anonymize_feedback(mut bundle: FeedbackBundle) -> FeedbackBundle {
    bundle.strip_reviewer_ids();
    bundle
}

#[derive(Debug, Clone)]
pub struct Workflow {
    config: WorkflowConfig,
    users: BTreeMap<String, UserRecord>,
    videos: BTreeMap<String, Video>,
    reviews: Vec<ReviewRecord>,
    notifications: Vec<Notification>,
    manual_releases: BTreeMap<u32, i64>,
    log: Vec<EventRecord>,
    clock: i64,
}

impl Workflow {
    pub fn new(config: WorkflowConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            users: BTreeMap::new(),
            videos: BTreeMap::new(),
            reviews: Vec::new(),
            notifications: Vec::new(),
            manual_releases: BTreeMap::new(),
            log: Vec::new(),
            clock: i64::MIN,
        })
    }

    /// Rebuilds state from a log written by an earlier instance.
    pub fn replay(config: WorkflowConfig, records: impl IntoIterator<Item = EventRecord>) -> Result<Self> {
        let mut wf = Self::new(config)?;
        for record in records {
            if record.seq != wf.log.len() as u64 + 1 {
                return Err(Error::Format(format!(
                    "event log out of sequence: expected {}, found {}",
                    wf.log.len() + 1,
                    record.seq
                )));
            }
            if record.timestamp < wf.clock {
                return Err(Error::Format(format!("event {} goes back in time", record.seq)));
            }
            wf.apply(&record)?;
            wf.log.push(record);
        }
        Ok(wf)
    }

    pub fn config(&self) -> &WorkflowConfig {
        &self.config
    }

    pub fn log(&self) -> &[EventRecord] {
        &self.log
    }

    fn append(&mut self, now: i64, event: EventPayload) -> Result<&EventRecord> {
        let record = EventRecord {
            seq: self.log.len() as u64 + 1,
            timestamp: now.max(self.clock),
            event,
        };
        self.apply(&record)?;
        self.log.push(record);
        Ok(self.log.last().expect("just pushed"))
    }

    fn next_seq(&self) -> u64 {
        self.log.len() as u64 + 1
    }

    fn apply(&mut self, record: &EventRecord) -> Result<()> {
        let at = record.timestamp;
        match &record.event {
            EventPayload::UserRegistered {
                user_id,
                condition,
                token_sha256,
            } => {
                if self.users.get(user_id).is_some_and(|u| u.condition.is_some()) {
                    return Err(Error::Parameter(format!("user {user_id} already registered")));
                }
                let user = self.users.entry(user_id.clone()).or_default();
                user.condition = Some(*condition);
                user.token_sha256 = token_sha256.clone();
            }
            EventPayload::PromptRelease { index } => {
                if self.config.prompt(*index).is_none() {
                    return Err(Error::NotFound(format!("prompt {index}")));
                }
                self.manual_releases.entry(*index).or_insert(at);
            }
            EventPayload::Upload {
                video_id,
                owner,
                prompt_index,
                title,
                description,
                qualities,
                media,
            } => {
                let user = self.registered_mut(owner)?;
                user.uploads.entry(*prompt_index).or_default().push(video_id.clone());
                self.videos.insert(
                    video_id.clone(),
                    Video {
                        video_id: video_id.clone(),
                        owner: owner.clone(),
                        prompt_index: *prompt_index,
                        title: title.clone(),
                        description: description.clone(),
                        qualities: qualities.clone(),
                        uploaded_at: at,
                        seq: record.seq,
                        media: media.clone(),
                        ready: false,
                    },
                );
            }
            EventPayload::AnalysisCompleted { video_id } => {
                self.videos
                    .get_mut(video_id)
                    .ok_or_else(|| Error::NotFound(format!("video {video_id}")))?
                    .ready = true;
            }
            EventPayload::Review {
                review_id,
                reviewer,
                video_id,
                comments,
                ratings,
                overall,
            } => {
                let video = self
                    .videos
                    .get(video_id)
                    .ok_or_else(|| Error::NotFound(format!("video {video_id}")))?;
                let owner = video.owner.clone();
                let title = video.title.clone();
                let user = self.registered_mut(reviewer)?;
                let counted = user.reviewed.insert(video_id.clone());
                if counted {
                    user.counted_reviews.push(at);
                }
                let comments = comments
                    .iter()
                    .enumerate()
                    .map(|(k, c)| Comment {
                        id: format!("{review_id}-c{}", k + 1),
                        video_id: video_id.clone(),
                        author_id: Some(reviewer.clone()),
                        text: c.text.clone(),
                        category: c.category,
                        video_timestamp: c.video_timestamp,
                        created_at: at,
                    })
                    .collect();
                self.reviews.push(ReviewRecord {
                    review_id: review_id.clone(),
                    reviewer: reviewer.clone(),
                    video_id: video_id.clone(),
                    comments,
                    ratings: ratings.clone(),
                    overall: *overall,
                    submitted_at: at,
                    counted,
                });
                self.notifications.push(Notification {
                    id: format!("n{}", record.seq),
                    user_id: owner,
                    video_id: video_id.clone(),
                    message: format!("New peer feedback on \"{title}\""),
                    created_at: at,
                });
            }
        }
        self.clock = self.clock.max(at);
        Ok(())
    }

    fn registered_mut(&mut self, user_id: &str) -> Result<&mut UserRecord> {
        self.users
            .get_mut(user_id)
            .filter(|u| u.condition.is_some())
            .ok_or_else(|| Error::NotFound(format!("user {user_id}")))
    }

    fn registered(&self, user_id: &str) -> Result<&UserRecord> {
        self.users
            .get(user_id)
            .filter(|u| u.condition.is_some())
            .ok_or_else(|| Error::NotFound(format!("user {user_id}")))
    }

    // ---- commands ----

    pub fn register_user(
        &mut self,
        user_id: &str,
        condition: Condition,
        token_sha256: Option<String>,
        now: i64,
    ) -> Result<()> {
        if user_id.trim().is_empty() {
            return Err(Error::Parameter("user id must not be empty".into()));
        }
        self.append(
            now,
            EventPayload::UserRegistered {
                user_id: user_id.to_string(),
                condition,
                token_sha256,
            },
        )?;
        Ok(())
    }

    /// Releases a prompt ahead of its scheduled time.
    pub fn release_prompt(&mut self, index: u32, now: i64) -> Result<()> {
        self.append(now, EventPayload::PromptRelease { index })?;
        Ok(())
    }

    pub fn upload(&mut self, request: UploadRequest, now: i64) -> Result<UploadOutcome> {
        self.registered(&request.owner)?;
        let now = now.max(self.clock);
        let prompt_index = match request.prompt_index {
            Some(p) => p,
            None => self.current_prompt(now).unwrap_or(1),
        };
        let gate = self.can_upload(&request.owner, prompt_index, now)?;
        if !gate.allowed {
            return Ok(UploadOutcome::GateClosed {
                prompt_index,
                reason: gate.reason(),
                reasons: gate.reasons,
            });
        }
        if let Err(reason) = self.check_qualities(&request.qualities) {
            return Ok(UploadOutcome::InvalidQualities { reason });
        }
        let video_id = format!("v{}", self.next_seq());
        self.append(
            now,
            EventPayload::Upload {
                video_id: video_id.clone(),
                owner: request.owner,
                prompt_index,
                title: request.title,
                description: request.description,
                qualities: request.qualities,
                media: request.media,
            },
        )?;
        Ok(UploadOutcome::Accepted { video_id, prompt_index })
    }

    /// Validates an owner's quality selection.
    pub fn check_qualities(&self, qualities: &[String]) -> std::result::Result<(), String> {
        let expected = self.config.qualities_per_video;
        if qualities.len() != expected {
            return Err(format!("qualities: expected {expected}"));
        }
        let mut seen = BTreeSet::new();
        for q in qualities {
            if !self.config.qualities.contains(q) {
                return Err(format!("qualities: unknown quality {q:?}"));
            }
            if !seen.insert(q) {
                return Err(format!("qualities: {q:?} selected twice"));
            }
        }
        Ok(())
    }

    pub fn mark_analyzed(&mut self, video_id: &str, now: i64) -> Result<()> {
        let video = self.video(video_id)?;
        if video.ready {
            return Ok(());
        }
        self.append(
            now,
            EventPayload::AnalysisCompleted {
                video_id: video_id.to_string(),
            },
        )?;
        Ok(())
    }

    pub fn submit_review(&mut self, submission: ReviewSubmission, now: i64) -> Result<ReviewOutcome> {
        self.registered(&submission.reviewer)?;
        let video = self.video(&submission.video_id)?;
        if let Err(reason) = self.check_review(video, &submission) {
            return Ok(ReviewOutcome::Rejected { reason });
        }
        let overall = submission.overall.unwrap_or_else(|| {
            let sum: u32 = submission.ratings.values().map(|&s| s as u32).sum();
            let n = submission.ratings.len() as u32;
            // round half up
            ((2 * sum + n) / (2 * n)) as u8
        });
        let review_id = format!("r{}", self.next_seq());
        self.append(
            now,
            EventPayload::Review {
                review_id: review_id.clone(),
                reviewer: submission.reviewer.clone(),
                video_id: submission.video_id,
                comments: submission.comments,
                ratings: submission.ratings,
                overall,
            },
        )?;
        let counted = self.reviews.last().is_some_and(|r| r.counted);
        Ok(ReviewOutcome::Accepted {
            review_id,
            counted,
            progress: self.progress(&submission.reviewer)?,
        })
    }

    fn check_review(&self, video: &Video, s: &ReviewSubmission) -> std::result::Result<(), String> {
        if video.owner == s.reviewer {
            return Err("own video".into());
        }
        let need = self.config.comments_per_review;
        if s.comments.len() < need {
            return Err(format!("comments {}/{need}", s.comments.len()));
        }
        for c in &s.comments {
            if c.text.trim().is_empty() {
                return Err("comments: empty text".into());
            }
            if c.video_timestamp.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                return Err("comments: invalid video timestamp".into());
            }
        }
        if let Some(extra) = s.ratings.keys().find(|q| !video.qualities.contains(q)) {
            return Err(format!("ratings: {extra:?} is not a selected quality"));
        }
        let rated = video.qualities.iter().filter(|q| s.ratings.contains_key(*q)).count();
        if rated < video.qualities.len() {
            return Err(format!("ratings {rated}/{}", video.qualities.len()));
        }
        if let Some((q, stars)) = s.ratings.iter().find(|(_, s)| !(1..=5).contains(*s)) {
            return Err(format!("ratings: {q:?} has {stars} stars, expected 1-5"));
        }
        if s.overall.is_some_and(|o| !(1..=5).contains(&o)) {
            return Err("ratings: overall must be 1-5 stars".into());
        }
        Ok(())
    }

    // ---- queries ----

    pub fn video(&self, video_id: &str) -> Result<&Video> {
        self.videos
            .get(video_id)
            .ok_or_else(|| Error::NotFound(format!("video {video_id}")))
    }

    pub fn videos(&self) -> impl Iterator<Item = &Video> {
        self.videos.values()
    }

    pub fn reviews(&self) -> &[ReviewRecord] {
        &self.reviews
    }

    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.users
            .iter()
            .filter(|(_, u)| u.condition.is_some())
            .map(|(id, _)| id.as_str())
    }

    pub fn user_state(&self, user_id: &str) -> Result<UserState> {
        let u = self.registered(user_id)?;
        Ok(UserState {
            user_id: user_id.to_string(),
            condition: u.condition.expect("registered"),
            reviews_completed: u.reviewed.len(),
            uploads: u.uploads.iter().map(|(p, v)| (*p, v.len())).collect(),
        })
    }

    pub fn condition(&self, user_id: &str) -> Result<Condition> {
        Ok(self.registered(user_id)?.condition.expect("registered"))
    }

    /// Looks up the user owning a token digest.
    pub fn user_for_token(&self, token_sha256: &str) -> Option<&str> {
        self.users
            .iter()
            .find(|(_, u)| u.token_sha256.as_deref() == Some(token_sha256))
            .map(|(id, _)| id.as_str())
    }

    /// Distinct peer videos the user has an accepted review for.
    pub fn progress(&self, user_id: &str) -> Result<usize> {
        Ok(self.registered(user_id)?.reviewed.len())
    }

    /// Effective release time: the schedule or an earlier manual release.
    pub fn release_time(&self, index: u32) -> Option<i64> {
        let scheduled = self.config.prompt(index)?.release_time;
        Some(match self.manual_releases.get(&index) {
            Some(&manual) => manual.min(scheduled),
            None => scheduled,
        })
    }

    pub fn is_released(&self, index: u32, now: i64) -> bool {
        self.release_time(index).is_some_and(|t| t <= now)
    }

    /// Highest prompt released at `now`.
    pub fn current_prompt(&self, now: i64) -> Option<u32> {
        (1..=self.config.prompts.len() as u32)
            .rev()
            .find(|&p| self.is_released(p, now))
    }

    /// Users' own videos are excluded, as are videos they already reviewed
    /// and videos still being analyzed. Newest first.
    pub fn feed_for_user(&self, user_id: &str) -> Result<Vec<VideoSummary>> {
        let user = self.registered(user_id)?;
        let mut videos: Vec<&Video> = self
            .videos
            .values()
            .filter(|v| v.ready && v.owner != user_id && !user.reviewed.contains(&v.video_id))
            .collect();
        videos.sort_by(|a, b| (b.uploaded_at, b.seq).cmp(&(a.uploaded_at, a.seq)));
        Ok(videos
            .into_iter()
            .map(|v| VideoSummary {
                video_id: v.video_id.clone(),
                owner: pseudonym(user_id, &v.owner),
                prompt_index: v.prompt_index,
                title: v.title.clone(),
                description: v.description.clone(),
                qualities: v.qualities.clone(),
                uploaded_at: v.uploaded_at,
            })
            .collect())
    }

    /// Latest upload per user for a prompt.
    pub fn final_videos(&self, prompt_index: u32) -> BTreeMap<String, String> {
        let mut latest: BTreeMap<&str, &Video> = BTreeMap::new();
        for v in self.videos.values().filter(|v| v.prompt_index == prompt_index) {
            let slot = latest.entry(v.owner.as_str()).or_insert(v);
            if (v.uploaded_at, v.seq) > (slot.uploaded_at, slot.seq) {
                *slot = v;
            }
        }
        latest
            .into_iter()
            .map(|(owner, v)| (owner.to_string(), v.video_id.clone()))
            .collect()
    }

    pub fn notifications(&self, user_id: &str) -> Result<Vec<Notification>> {
        self.registered(user_id)?;
        Ok(self
            .notifications
            .iter()
            .filter(|n| n.user_id == user_id)
            .cloned()
            .collect())
    }

    pub fn all_notifications(&self) -> &[Notification] {
        &self.notifications
    }

    /// Comments and ratings received by a video, with reviewer identities.
    pub fn peer_feedback(&self, video_id: &str) -> Result<PeerFeedback> {
        let video = self.video(video_id)?;
        let mut feedback = PeerFeedback {
            qualities: video.qualities.clone(),
            ..Default::default()
        };
        for r in self.reviews.iter().filter(|r| r.video_id == video_id) {
            feedback.comments.extend(r.comments.iter().cloned());
            for (quality, &stars) in &r.ratings {
                feedback.ratings.push(RatingEntry {
                    rater_id: Some(r.reviewer.clone()),
                    quality: quality.clone(),
                    stars,
                });
            }
            feedback.overall.push(r.overall);
        }
        Ok(feedback)
    }

    /// Mean overall rating received per user, as of the last refresh boundary.
    pub fn leaderboard(&self, now: i64) -> Leaderboard {
        let anchor = self.config.prompts[0].release_time;
        let period = self.config.leaderboard_refresh_secs;
        let refreshed_at = anchor + (now - anchor).div_euclid(period) * period;
        let mut totals: BTreeMap<&str, (u32, usize)> = BTreeMap::new();
        for r in self.reviews.iter().filter(|r| r.submitted_at <= refreshed_at) {
            let owner = self.videos[&r.video_id].owner.as_str();
            let t = totals.entry(owner).or_default();
            t.0 += r.overall as u32;
            t.1 += 1;
        }
        let mut entries: Vec<LeaderboardEntry> = totals
            .into_iter()
            .map(|(user, (sum, n))| LeaderboardEntry {
                rank: 0,
                user_id: user.to_string(),
                mean_rating: sum as f64 / n as f64,
                ratings: n,
            })
            .collect();
        entries.sort_by(|a, b| {
            b.mean_rating
                .total_cmp(&a.mean_rating)
                .then(b.ratings.cmp(&a.ratings))
                .then_with(|| a.user_id.cmp(&b.user_id))
        });
        for (i, e) in entries.iter_mut().enumerate() {
            e.rank = i + 1;
        }
        Leaderboard { refreshed_at, entries }
    }

    /// Overall ratings of every prompt's final videos, one row per review.
    pub fn ratings_export(&self) -> Vec<RatingRow> {
        let finals: BTreeSet<String> = (1..=self.config.prompts.len() as u32)
            .flat_map(|p| self.final_videos(p).into_values())
            .collect();
        self.reviews
            .iter()
            .filter(|r| finals.contains(&r.video_id))
            .map(|r| {
                let v = &self.videos[&r.video_id];
                RatingRow {
                    rater_id: r.reviewer.clone(),
                    video_id: v.video_id.clone(),
                    user_id: v.owner.clone(),
                    prompt_index: v.prompt_index,
                    condition: self.users[&v.owner].condition.expect("registered"),
                    overall_rating: r.overall,
                    timestamp: r.submitted_at,
                }
            })
            .collect()
    }
}
