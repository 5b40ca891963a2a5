//! HTTP/JSON API. Every response document carries `schema_version`.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, FromRequestParts, Multipart, Path, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use podium::formats;
use podium::moderation::Category;
use podium::pipeline::{layout, MediaInputs};
use podium::workflow::{
    pseudonym, CommentDraft, Condition, GateReason, Notification, ReviewOutcome, ReviewSubmission, UploadOutcome, UploadRequest,
    VideoSummary,
};
use podium::Error;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::app::{Service, VideoStatus};

pub const API_SCHEMA_VERSION: u32 = 1;
pub const MAX_UPLOAD_BYTES: usize = 256 * 1024 * 1024;

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/videos", post(upload))
        .route("/videos/{id}", get(video))
        .route("/videos/{id}/media/{name}", get(media))
        .route("/videos/{id}/reviews", post(review))
        .route("/videos/{id}/feedback", get(feedback))
        .route("/feed", get(feed))
        .route("/notifications", get(notifications))
        .route("/leaderboard", get(leaderboard))
        .route("/me", get(me))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(service)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    reasons: Option<Vec<GateReason>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            reasons: None,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound(what) => ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("{what} not found")),
            Error::Io(e) => {
                tracing::error!(error = %e, "storage failure");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "storage failure")
            }
            other => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid", other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({
            "schema_version": API_SCHEMA_VERSION,
            "error": self.code,
            "message": self.message,
        });
        if let Some(reasons) = self.reasons {
            body["reasons"] = json!(reasons);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// The caller, identified by `Authorization: Bearer <token>`.
pub struct User(pub String);

impl FromRequestParts<Arc<Service>> for User {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, service: &Arc<Service>) -> ApiResult<Self> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .ok_or_else(|| ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing bearer token"))?;
        service
            .user_for_token(token)
            .map(User)
            .ok_or_else(|| ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "unknown token"))
    }
}

#[derive(Default)]
struct UploadForm {
    wav: Option<Bytes>,
    frames: Option<Bytes>,
    frame_rate: Option<String>,
    transcript: Option<String>,
    smile: Option<String>,
    title: String,
    description: String,
    qualities: Vec<String>,
    prompt_index: Option<String>,
}

async fn read_form(mut multipart: Multipart) -> ApiResult<UploadForm> {
    let bad = |m: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_form", m);
    let mut form = UploadForm::default();
    while let Some(field) = multipart.next_field().await.map_err(|e| bad(e.to_string()))? {
        let name = field.name().unwrap_or_default().to_string();
        match name.as_str() {
            "wav" => form.wav = Some(field.bytes().await.map_err(|e| bad(e.to_string()))?),
            "frames" => form.frames = Some(field.bytes().await.map_err(|e| bad(e.to_string()))?),
            _ => {
                let text = field.text().await.map_err(|e| bad(format!("{name}: {e}")))?;
                match name.as_str() {
                    "frame_rate" => form.frame_rate = Some(text),
                    "transcript" => form.transcript = Some(text),
                    "smile" => form.smile = Some(text),
                    "title" => form.title = text,
                    "description" => form.description = text,
                    "prompt_index" => form.prompt_index = Some(text),
                    "qualities" if text.trim_start().starts_with('[') => form
                        .qualities
                        .extend(serde_json::from_str::<Vec<String>>(&text).map_err(|e| bad(format!("qualities: {e}")))?),
                    "qualities" => form.qualities.push(text),
                    _ => return Err(bad(format!("unexpected field {name:?}"))),
                }
            }
        }
    }
    Ok(form)
}

fn invalid_media(message: String) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_media", message)
}

fn prefixed(part: &str, e: Error) -> String {
    let text = match e {
        Error::Format(m) => m,
        other => other.to_string(),
    };
    if text.starts_with(part) {
        text
    } else {
        format!("{part}: {text}")
    }
}

/// Parses and checks every media part, then writes them in the submission
/// layout under `staging`.
fn stage_media(form: &UploadForm, limits: &podium::pipeline::AnalysisConfig, staging: &std::path::Path) -> ApiResult<()> {
    let wav = form.wav.as_ref().ok_or_else(|| invalid_media("wav: missing".into()))?;
    let frames = form.frames.as_ref().ok_or_else(|| invalid_media("frames: missing".into()))?;
    let frame_rate: f64 = form
        .frame_rate
        .as_deref()
        .ok_or_else(|| invalid_media("frame_rate: missing".into()))?
        .trim()
        .parse()
        .map_err(|_| invalid_media("frame_rate: not a number".into()))?;
    let transcript_text = form
        .transcript
        .as_deref()
        .ok_or_else(|| invalid_media("transcript: missing".into()))?;

    let audio = formats::read_wav(Cursor::new(wav.as_ref())).map_err(|e| invalid_media(prefixed("wav", e)))?;
    let frames = formats::read_frame_archive(frames, frame_rate).map_err(|e| invalid_media(prefixed("frames", e)))?;
    let transcript =
        formats::parse_transcript(transcript_text).map_err(|e| invalid_media(prefixed("transcript", e)))?;
    let smile = match &form.smile {
        Some(text) => {
            let input = formats::parse_smile_sidecar(text).map_err(|e| invalid_media(prefixed("smile", e)))?;
            if input.scores.len() != frames.len() {
                return Err(invalid_media(format!(
                    "smile: {} scores for {} frames",
                    input.scores.len(),
                    frames.len()
                )));
            }
            Some(input)
        }
        None => None,
    };
    let media = MediaInputs {
        audio,
        frames,
        transcript,
        smile,
    };
    media.check_limits(limits).map_err(|e| invalid_media(prefixed("limits", e)))?;

    let write = || -> podium::Result<()> {
        std::fs::create_dir_all(staging)?;
        std::fs::write(staging.join(layout::AUDIO), wav)?;
        formats::write_frames_dir(&staging.join(layout::FRAMES), &media.frames)?;
        std::fs::write(staging.join(layout::TRANSCRIPT), transcript_text)?;
        if let Some(text) = &form.smile {
            std::fs::write(staging.join(layout::SMILE), text)?;
        }
        Ok(())
    };
    write().map_err(ApiError::from)
}

fn gate_closed(prompt_index: u32, reason: String, reasons: Vec<GateReason>) -> ApiError {
    ApiError {
        reasons: Some(reasons),
        ..ApiError::new(
            StatusCode::FORBIDDEN,
            "gate_closed",
            format!("prompt {prompt_index}: {reason}"),
        )
    }
}

async fn upload(State(service): State<Arc<Service>>, User(user): User, multipart: Multipart) -> ApiResult<Response> {
    let form = read_form(multipart).await?;
    let prompt_index = match form.prompt_index.as_deref() {
        Some(p) => Some(
            p.trim()
                .parse::<u32>()
                .map_err(|_| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_form", "prompt_index: not a number"))?,
        ),
        None => None,
    };

    // Cheap checks first so a closed gate never costs a media parse.
    let now = service.now();
    let prompt = service.read(|wf| -> ApiResult<u32> {
        let prompt = prompt_index.unwrap_or_else(|| wf.current_prompt(now).unwrap_or(1));
        let gate = wf.can_upload(&user, prompt, now)?;
        if !gate.allowed {
            return Err(gate_closed(prompt, gate.reason(), gate.reasons));
        }
        wf.check_qualities(&form.qualities)
            .map_err(|r| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_qualities", r))?;
        Ok(prompt)
    })?;

    let staging = service.data().staging(&format!("{:016x}", rand::random::<u64>()));
    let limits = service.analysis_config().clone();
    let (form, staging) = tokio::task::spawn_blocking(move || {
        let staged = stage_media(&form, &limits, &staging);
        if staged.is_err() {
            let _ = std::fs::remove_dir_all(&staging);
        }
        staged.map(|()| (form, staging))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;

    let digests = Service::media_digests(&staging)?;
    let request = UploadRequest {
        owner: user,
        prompt_index: Some(prompt),
        title: form.title,
        description: form.description,
        qualities: form.qualities,
        media: digests,
    };
    let outcome = service.mutate(|wf, now| {
        let outcome = wf.upload(request, now)?;
        if let UploadOutcome::Accepted { video_id, .. } = &outcome {
            service.install_media(&staging, video_id)?;
        }
        Ok(outcome)
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            return Err(e.into());
        }
    };
    match outcome {
        UploadOutcome::Accepted { video_id, prompt_index } => {
            service.schedule_analysis(video_id.clone());
            Ok((
                StatusCode::ACCEPTED,
                Json(json!({
                    "schema_version": API_SCHEMA_VERSION,
                    "video_id": video_id,
                    "prompt_index": prompt_index,
                    "status": VideoStatus::Processing,
                })),
            )
                .into_response())
        }
        UploadOutcome::GateClosed { prompt_index, reasons, reason } => {
            let _ = std::fs::remove_dir_all(&staging);
            Err(gate_closed(prompt_index, reason, reasons))
        }
        UploadOutcome::InvalidQualities { reason } => {
            let _ = std::fs::remove_dir_all(&staging);
            Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_qualities", reason))
        }
    }
}

#[derive(Serialize)]
struct VideoView {
    schema_version: u32,
    video_id: String,
    /// The caller's own id for their videos, a pseudonym otherwise.
    owner: String,
    mine: bool,
    prompt_index: u32,
    title: String,
    description: String,
    qualities: Vec<String>,
    uploaded_at: i64,
    status: VideoStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

async fn video(State(service): State<Arc<Service>>, User(user): User, Path(id): Path<String>) -> ApiResult<Json<VideoView>> {
    let video = service.read(|wf| wf.video(&id).cloned())?;
    let mine = video.owner == user;
    if !mine && !video.ready {
        return Err(Error::NotFound(format!("video {id}")).into());
    }
    Ok(Json(VideoView {
        schema_version: API_SCHEMA_VERSION,
        owner: if mine { user.clone() } else { pseudonym(&user, &video.owner) },
        mine,
        prompt_index: video.prompt_index,
        title: video.title,
        description: video.description,
        qualities: video.qualities,
        uploaded_at: video.uploaded_at,
        status: service.status(&id)?,
        error: if mine { service.failure(&id) } else { None },
        video_id: video.video_id,
    }))
}

async fn media(
    State(service): State<Arc<Service>>,
    User(user): User,
    Path((id, name)): Path<(String, String)>,
) -> ApiResult<Response> {
    let content_type = match name.as_str() {
        layout::AUDIO => "audio/wav",
        layout::TRANSCRIPT => "application/json",
        _ => return Err(Error::NotFound(format!("media {name}")).into()),
    };
    let video = service.read(|wf| wf.video(&id).cloned())?;
    if video.owner != user && !video.ready {
        return Err(Error::NotFound(format!("video {id}")).into());
    }
    let path: PathBuf = service.data().media(&id).join(&name);
    let bytes = tokio::fs::read(path).await.map_err(Error::from)?;
    Ok(([(header::CONTENT_TYPE, content_type)], bytes).into_response())
}

#[derive(Debug, Deserialize)]
struct ReviewBody {
    comments: Vec<CommentBody>,
    ratings: BTreeMap<String, u8>,
    #[serde(default)]
    overall: Option<u8>,
}

#[derive(Debug, Deserialize)]
struct CommentBody {
    text: String,
    category: Category,
    #[serde(default)]
    video_timestamp: Option<f64>,
}

async fn review(
    State(service): State<Arc<Service>>,
    User(user): User,
    Path(id): Path<String>,
    Json(body): Json<ReviewBody>,
) -> ApiResult<Response> {
    let video = service.read(|wf| wf.video(&id).cloned())?;
    if video.owner != user && !video.ready {
        return Err(Error::NotFound(format!("video {id}")).into());
    }
    let submission = ReviewSubmission {
        reviewer: user,
        video_id: id,
        comments: body
            .comments
            .into_iter()
            .map(|c| CommentDraft {
                text: c.text,
                category: c.category,
                video_timestamp: c.video_timestamp,
            })
            .collect(),
        ratings: body.ratings,
        overall: body.overall,
    };
    match service.mutate(|wf, now| wf.submit_review(submission, now))? {
        ReviewOutcome::Accepted {
            review_id,
            counted,
            progress,
        } => Ok((
            StatusCode::CREATED,
            Json(json!({
                "schema_version": API_SCHEMA_VERSION,
                "review_id": review_id,
                "counted": counted,
                "progress": progress,
            })),
        )
            .into_response()),
        ReviewOutcome::Rejected { reason } => {
            Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_review", reason))
        }
    }
}

async fn feedback(State(service): State<Arc<Service>>, User(user): User, Path(id): Path<String>) -> ApiResult<Response> {
    let (owner, ready) = service.read(|wf| wf.video(&id).map(|v| (v.owner.clone(), v.ready)))?;
    if owner != user {
        return Err(ApiError::new(StatusCode::FORBIDDEN, "forbidden", "feedback is only visible to the video owner"));
    }
    if !ready {
        let message = match service.failure(&id) {
            Some(e) => format!("analysis failed: {e}"),
            None => "analysis still running".into(),
        };
        return Err(ApiError::new(StatusCode::CONFLICT, "analysis_pending", message));
    }
    let treatment = service.read(|wf| wf.condition(&user))? == Condition::Treatment;
    if treatment && !service.has_moderator() {
        return Err(ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "models_unavailable",
            "moderation models are not installed",
        ));
    }
    let bundle = service.feedback_bundle(&id)?;
    let body = bundle.to_canonical_json()?;
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

#[derive(Serialize)]
struct FeedView {
    schema_version: u32,
    videos: Vec<VideoSummary>,
}

async fn feed(State(service): State<Arc<Service>>, User(user): User) -> ApiResult<Json<FeedView>> {
    let videos = service.read(|wf| wf.feed_for_user(&user))?;
    Ok(Json(FeedView {
        schema_version: API_SCHEMA_VERSION,
        videos,
    }))
}

#[derive(Serialize)]
struct NotificationsView {
    schema_version: u32,
    notifications: Vec<Notification>,
}

async fn notifications(State(service): State<Arc<Service>>, User(user): User) -> ApiResult<Json<NotificationsView>> {
    let notifications = service.read(|wf| wf.notifications(&user))?;
    Ok(Json(NotificationsView {
        schema_version: API_SCHEMA_VERSION,
        notifications,
    }))
}

async fn leaderboard(State(service): State<Arc<Service>>, User(_): User) -> ApiResult<Response> {
    let now = service.now();
    let board = service.read(|wf| wf.leaderboard(now));
    let mut value = serde_json::to_value(board).map_err(Error::from)?;
    value["schema_version"] = json!(API_SCHEMA_VERSION);
    Ok(Json(value).into_response())
}

async fn me(State(service): State<Arc<Service>>, User(user): User) -> ApiResult<Response> {
    let now = service.now();
    let value = service.read(|wf| -> podium::Result<serde_json::Value> {
        let state = wf.user_state(&user)?;
        let gates = wf
            .config()
            .prompts
            .iter()
            .map(|p| {
                let gate = wf.can_upload(&user, p.index, now)?;
                Ok(json!({
                    "prompt_index": p.index,
                    "allowed": gate.allowed,
                    "reason": gate.reason(),
                    "reasons": gate.reasons,
                }))
            })
            .collect::<podium::Result<Vec<_>>>()?;
        Ok(json!({
            "schema_version": API_SCHEMA_VERSION,
            "user_id": state.user_id,
            "condition": state.condition,
            "reviews_completed": state.reviews_completed,
            "uploads": state.uploads,
            "current_prompt": wf.current_prompt(now),
            "gates": gates,
        }))
    })?;
    Ok(Json(value).into_response())
}
