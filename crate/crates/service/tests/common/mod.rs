#![allow(dead_code)]

use std::io::Cursor;
use std::path::Path;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use podium::fixture::{FixtureSubmission, FIXTURE_SEED};
use podium::formats;
use podium::media::{AudioTrack, FrameSequence, SmileProviderInput};
use podium::moderation::{train_moderation, Moderator};
use podium::speech::{TimedTranscript, WordToken};
use podium::workflow::{Condition, DEFAULT_QUALITIES};
use podium_service::app::sha256_hex;
use podium_service::{api, DataDir, Service, ServiceOptions};
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

pub const START: i64 = 1_000_000;

pub struct Harness {
    pub dir: TempDir,
    pub clock: Arc<AtomicI64>,
    pub service: Arc<Service>,
    pub router: Router,
}

pub struct Reply {
    pub status: StatusCode,
    pub bytes: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }

    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.bytes).into_owned()
    }
}

pub fn token_for(user: &str) -> String {
    format!("token-{user}")
}

pub fn moderator() -> Moderator {
    let fixture = FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment).unwrap();
    let dir = tempfile::tempdir().unwrap();
    train_moderation(&fixture.training, &|_| None, 7).unwrap().write(dir.path()).unwrap();
    Moderator::load(dir.path()).unwrap()
}

impl Harness {
    pub fn new(moderator: Option<Moderator>) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let clock = Arc::new(AtomicI64::new(START));
        let service = open(dir.path(), &clock, moderator);
        let router = api::router(service.clone());
        Self {
            dir,
            clock,
            service,
            router,
        }
    }

    /// A second service over the same data directory, as after a restart.
    /// No analysis jobs are resumed.
    pub fn reopen(&self, moderator: Option<Moderator>) -> Self {
        self.reopen_with(moderator, |_| {})
    }

    /// Like [`Harness::reopen`], after `edit` has changed the copied data directory.
    pub fn reopen_with(&self, moderator: Option<Moderator>, edit: impl FnOnce(&Path)) -> Self {
        let dir = tempfile::tempdir().unwrap();
        copy_dir(self.dir.path(), dir.path());
        edit(dir.path());
        let clock = Arc::new(AtomicI64::new(self.now()));
        let service = open(dir.path(), &clock, moderator);
        let router = api::router(service.clone());
        Self {
            dir,
            clock,
            service,
            router,
        }
    }

    pub fn now(&self) -> i64 {
        self.clock.load(Ordering::SeqCst)
    }

    pub fn set_time(&self, t: i64) {
        self.clock.store(t, Ordering::SeqCst);
    }

    pub fn add_user(&self, user: &str, condition: Condition) {
        let digest = sha256_hex(token_for(user).as_bytes());
        self.service
            .mutate(|wf, now| wf.register_user(user, condition, Some(digest), now))
            .unwrap();
    }

    pub async fn call(&self, method: Method, uri: &str, user: Option<&str>, body: Option<(String, Vec<u8>)>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(user) = user {
            req = req.header(header::AUTHORIZATION, format!("Bearer {}", token_for(user)));
        }
        let body = match body {
            Some((content_type, bytes)) => {
                req = req.header(header::CONTENT_TYPE, content_type);
                Body::from(bytes)
            }
            None => Body::empty(),
        };
        let response = self.router.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = response.status();
        let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, bytes }
    }

    pub async fn get(&self, uri: &str, user: &str) -> Reply {
        self.call(Method::GET, uri, Some(user), None).await
    }

    pub async fn upload(&self, user: &str, form: &Form) -> Reply {
        self.call(Method::POST, "/videos", Some(user), Some(form.encode())).await
    }

    /// Uploads, waits for analysis and returns the new video id.
    pub async fn upload_ready(&self, user: &str, form: &Form) -> String {
        let reply = self.upload(user, form).await;
        assert_eq!(reply.status, StatusCode::ACCEPTED, "{}", reply.text());
        self.service.wait_for_jobs().await;
        reply.json()["video_id"].as_str().unwrap().to_string()
    }

    pub async fn review(&self, user: &str, video_id: &str, body: &Value) -> Reply {
        let bytes = serde_json::to_vec(body).unwrap();
        self.call(
            Method::POST,
            &format!("/videos/{video_id}/reviews"),
            Some(user),
            Some(("application/json".into(), bytes)),
        )
        .await
    }
}

fn open(dir: &Path, clock: &Arc<AtomicI64>, moderator: Option<Moderator>) -> Arc<Service> {
    let clock = clock.clone();
    Service::open(
        DataDir::new(dir),
        ServiceOptions {
            workers: 2,
            clock: Arc::new(move || clock.load(Ordering::SeqCst)),
            moderator,
        },
    )
    .unwrap()
}

pub fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

pub fn qualities() -> Vec<String> {
    DEFAULT_QUALITIES[..5].iter().map(|q| q.to_string()).collect()
}

/// Review body with `comments` timestamped comments and 4 stars everywhere.
pub fn review_body(comments: usize) -> Value {
    let ratings: serde_json::Map<String, Value> = qualities().into_iter().map(|q| (q, json!(4))).collect();
    json!({
        "comments": (0..comments)
            .map(|i| json!({
                "text": format!("clear point number {i}, maybe slow down a little"),
                "category": "speech",
                "video_timestamp": 0.5 * i as f64,
            }))
            .collect::<Vec<_>>(),
        "ratings": ratings,
    })
}

/// Multipart upload form.
#[derive(Debug, Clone)]
pub struct Form {
    pub fields: Vec<(String, Vec<u8>)>,
}

impl Form {
    pub fn set(&mut self, name: &str, value: impl Into<Vec<u8>>) -> &mut Self {
        self.fields.retain(|(n, _)| n != name);
        self.fields.push((name.into(), value.into()));
        self
    }

    pub fn remove(&mut self, name: &str) -> &mut Self {
        self.fields.retain(|(n, _)| n != name);
        self
    }

    pub fn get(&self, name: &str) -> &[u8] {
        &self.fields.iter().find(|(n, _)| n == name).unwrap().1
    }

    pub fn encode(&self) -> (String, Vec<u8>) {
        let boundary = "podium-test-boundary-7f3a";
        let mut body = Vec::new();
        for (name, value) in &self.fields {
            body.extend_from_slice(format!("--{boundary}\r\n").as_bytes());
            let disposition = match name.as_str() {
                "wav" | "frames" => format!("form-data; name=\"{name}\"; filename=\"{name}.bin\""),
                _ => format!("form-data; name=\"{name}\""),
            };
            body.extend_from_slice(format!("Content-Disposition: {disposition}\r\n\r\n").as_bytes());
            body.extend_from_slice(value);
            body.extend_from_slice(b"\r\n");
        }
        body.extend_from_slice(format!("--{boundary}--\r\n").as_bytes());
        (format!("multipart/form-data; boundary={boundary}"), body)
    }
}

fn wav_bytes(audio: &AudioTrack) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    formats::write_wav(&mut out, audio).unwrap();
    out.into_inner()
}

fn form_from(audio: &AudioTrack, frames: &FrameSequence, transcript: &TimedTranscript, smile: Option<&SmileProviderInput>) -> Form {
    let mut form = Form { fields: Vec::new() };
    form.set("wav", wav_bytes(audio))
        .set("frames", formats::write_frame_archive(frames))
        .set("frame_rate", frames.frame_rate().to_string())
        .set("transcript", formats::write_transcript(transcript).unwrap())
        .set("title", "Tell me about yourself")
        .set("description", "first attempt");
    if let Some(smile) = smile {
        form.set("smile", formats::write_smile_sidecar(smile));
    }
    for q in qualities() {
        form.fields.push(("qualities".into(), q.into_bytes()));
    }
    form
}

/// Two seconds of voiced audio with ten small frames; `seed` varies the content.
pub fn tiny_form(seed: u64) -> Form {
    let rate = 8000;
    let f0 = 120.0 + (seed % 50) as f64;
    let samples = (0..2 * rate)
        .map(|i| 0.3 * (std::f64::consts::TAU * f0 * i as f64 / rate as f64).sin())
        .collect();
    let audio = AudioTrack::new(samples, rate as u32).unwrap();
    let frames = (0..10u8)
        .map(|k| (0..16 * 12).map(|p| (p as u8).wrapping_mul(k).wrapping_add(seed as u8)).collect())
        .collect();
    let frames = FrameSequence::new(16, 12, frames, 5.0).unwrap();
    let words = ["so", "um", "hello", "everyone"]
        .iter()
        .enumerate()
        .map(|(i, w)| WordToken {
            text: w.to_string(),
            start: 0.2 + 0.4 * i as f64,
            end: 0.5 + 0.4 * i as f64,
            confidence: 0.9,
        })
        .collect();
    let transcript = TimedTranscript::new(words, "en").unwrap();
    let smile = SmileProviderInput {
        scores: (0..10).map(|k| k as f64 / 10.0).collect(),
        range: (0.0, 1.0),
        synthetic: false,
    };
    form_from(&audio, &frames, &transcript, Some(&smile))
}

/// The thirty second fixture submission as an upload form.
pub fn fixture_form() -> Form {
    let fixture = FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment).unwrap();
    let m = &fixture.media;
    form_from(&m.audio, &m.frames, &m.transcript, m.smile.as_ref())
}
