//! Starts the API on a local port over a scratch data directory and walks
//! one feedback cycle over HTTP: upload, analysis, peer review, feedback.
//!
//! cargo run -p podium-service --example http_session

use std::future::IntoFuture;
use std::io::Cursor;
use std::time::Duration;

use podium::fixture::{FixtureSubmission, FIXTURE_SEED};
use podium::formats;
use podium::workflow::{Condition, DEFAULT_QUALITIES};
use podium_service::app::sha256_hex;
use podium_service::{api, DataDir, Service, ServiceOptions};
use reqwest::multipart::{Form, Part};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scratch = tempfile::tempdir()?;
    let service = Service::open(DataDir::new(scratch.path()), ServiceOptions::default())?;
    for (user, condition) in [("ana", Condition::Control), ("ben", Condition::Control)] {
        let digest = sha256_hex(format!("{user}-token").as_bytes());
        service.mutate(|wf, now| wf.register_user(user, condition, Some(digest), now))?;
    }
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(axum::serve(listener, api::router(service.clone())).into_future());
    println!("serving {base} from {}", scratch.path().display());

    let fixture = FixtureSubmission::generate(FIXTURE_SEED, Condition::Control)?;
    let media = &fixture.media;
    let mut wav = Cursor::new(Vec::new());
    formats::write_wav(&mut wav, &media.audio)?;
    let mut form = Form::new()
        .part("wav", Part::bytes(wav.into_inner()).file_name("talk.wav"))
        .part("frames", Part::bytes(formats::write_frame_archive(&media.frames)).file_name("frames.pgm"))
        .text("frame_rate", media.frames.frame_rate().to_string())
        .text("transcript", formats::write_transcript(&media.transcript)?)
        .text("title", "Tell me about yourself");
    if let Some(smile) = &media.smile {
        form = form.text("smile", formats::write_smile_sidecar(smile));
    }
    for q in &DEFAULT_QUALITIES[..5] {
        form = form.text("qualities", q.to_string());
    }

    let http = reqwest::Client::new();
    let uploaded: Value = http
        .post(format!("{base}/videos"))
        .bearer_auth("ana-token")
        .multipart(form)
        .send()
        .await?
        .json()
        .await?;
    let id = uploaded["video_id"].as_str().ok_or("upload refused")?.to_string();
    println!("uploaded {id}: {}", uploaded["status"]);

    loop {
        let view: Value = http.get(format!("{base}/videos/{id}")).bearer_auth("ana-token").send().await?.json().await?;
        if view["status"] != "processing" {
            println!("analysis {}", view["status"]);
            break;
        }
        tokio::time::sleep(Duration::from_millis(100)).await;
    }

    let feed: Value = http.get(format!("{base}/feed")).bearer_auth("ben-token").send().await?.json().await?;
    println!("ben's feed shows the owner as {}", feed["videos"][0]["owner"]);
    let ratings: serde_json::Map<String, Value> = DEFAULT_QUALITIES[..5].iter().map(|q| (q.to_string(), json!(4))).collect();
    let review = json!({
        "comments": [
            { "text": "Strong opening, you made eye contact right away.", "category": "friendliness", "video_timestamp": 2.0 },
            { "text": "Try pausing instead of saying um.", "category": "speech", "video_timestamp": 9.5 },
            { "text": "Calm posture, your hands stayed relaxed the whole time.", "category": "movement" },
        ],
        "ratings": ratings,
    });
    let reviewed: Value = http
        .post(format!("{base}/videos/{id}/reviews"))
        .bearer_auth("ben-token")
        .json(&review)
        .send()
        .await?
        .json()
        .await?;
    println!("review accepted, ben has {} counted review(s)", reviewed["progress"]);

    let bundle: Value = http.get(format!("{base}/videos/{id}/feedback")).bearer_auth("ana-token").send().await?.json().await?;
    println!("ana's feedback: {} comments, overall {}", bundle["comments"].as_array().map_or(0, Vec::len), bundle["overall"]["mean"]);
    for c in bundle["comments"].as_array().into_iter().flatten() {
        println!("  [{}] {}", c["category"], c["text"]);
    }
    Ok(())
}
