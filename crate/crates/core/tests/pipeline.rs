use std::path::PathBuf;

use podium::bundle::FeedbackBundle;
use podium::fixture::{FixtureSubmission, FIXTURE_SEED};
use podium::pipeline::{analyze_media, analyze_submission_dir, layout, AnalysisConfig};
use podium::workflow::Condition;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn committed(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("bundles").join(name)).unwrap()
}

#[test]
fn committed_control_bundle_is_reproduced() {
    let dir = tempfile::tempdir().unwrap();
    FixtureSubmission::generate(FIXTURE_SEED, Condition::Control)
        .unwrap()
        .write(dir.path(), FIXTURE_SEED)
        .unwrap();
    let bundle = analyze_submission_dir(dir.path(), &AnalysisConfig::default()).unwrap();
    assert_eq!(bundle.to_canonical_json().unwrap(), committed("control.json"));
    assert!(bundle.automated.is_none() && bundle.ranked_comments.is_none() && bundle.summary.is_none());
}

#[test]
fn regenerated_treatment_submission_matches_committed_files() {
    let dir = tempfile::tempdir().unwrap();
    FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment)
        .unwrap()
        .write(dir.path(), FIXTURE_SEED)
        .unwrap();
    for file in [layout::MANIFEST, layout::AUDIO, layout::TRANSCRIPT, layout::SMILE, layout::FEEDBACK] {
        let fresh = std::fs::read(dir.path().join(file)).unwrap();
        let kept = std::fs::read(fixtures().join("submission").join(file)).unwrap();
        assert!(fresh == kept, "{file} drifted from the committed fixture");
    }
}

#[test]
fn bundles_never_carry_reviewer_ids() {
    for name in ["treatment.json", "control.json"] {
        let text = committed(name);
        for who in ["alice", "bob", "author_id", "rater_id"] {
            assert!(!text.contains(who), "{name} mentions {who}");
        }
    }
}

#[test]
fn treatment_bundle_exposes_the_viewer_contract() {
    let bundle = FeedbackBundle::from_json(&committed("treatment.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&committed("treatment.json")).unwrap();
    for key in [
        "schema_version", "video_id", "condition", "playback", "qualities", "comments", "ratings",
        "ratings_summary", "overall", "automated", "ranked_comments", "summary",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let automated = bundle.automated.unwrap();
    let names: Vec<String> = automated.series.iter().map(|s| s.signal.name().to_string()).collect();
    assert_eq!(names, ["smile", "movement", "loudness", "pitch"]);
    assert!(automated.series.iter().all(|s| s.dt > 0.0));
    assert!(!automated.fillers.is_empty());
    let summary = bundle.summary.unwrap();
    assert!(summary.top_positive.is_some() || summary.top_negative.is_some());
}

#[test]
fn oversized_media_is_refused() {
    let fixture = FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment).unwrap();
    let config = AnalysisConfig { max_audio_secs: 10.0, ..AnalysisConfig::default() };
    assert!(analyze_media(&fixture.media, &config).is_err());
    let config = AnalysisConfig { max_frame_rate: 2.0, ..AnalysisConfig::default() };
    assert!(analyze_media(&fixture.media, &config).is_err());
}

#[test]
fn missing_smile_scores_yield_a_flagged_zero_series() {
    let mut fixture = FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment).unwrap();
    fixture.media.smile = None;
    let automated = analyze_media(&fixture.media, &AnalysisConfig::default()).unwrap();
    let smile = &automated.series[0];
    assert!(smile.synthetic);
    assert!(smile.present().all(|v| v == 0.0));
}

#[test]
fn treatment_without_models_fails() {
    let dir = tempfile::tempdir().unwrap();
    FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment)
        .unwrap()
        .write(dir.path(), FIXTURE_SEED)
        .unwrap();
    std::fs::remove_dir_all(dir.path().join(layout::MODELS)).unwrap();
    assert!(analyze_submission_dir(dir.path(), &AnalysisConfig::default()).is_err());
}
