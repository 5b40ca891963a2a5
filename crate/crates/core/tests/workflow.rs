use std::collections::BTreeMap;

use podium::bundle::FeedbackBundle;
use podium::moderation::Category;
use podium::workflow::{
    anonymize_feedback, Condition, CommentDraft, EventRecord, GateMode, GateReason, ReviewOutcome,
    ReviewSubmission, UploadOutcome, UploadRequest, Workflow, WorkflowConfig, DEFAULT_QUALITIES, TWO_DAYS,
};
use podium::Error;

const DAY: i64 = 24 * 3600;

fn qualities() -> Vec<String> {
    DEFAULT_QUALITIES[..5].iter().map(|q| q.to_string()).collect()
}

fn upload(wf: &mut Workflow, owner: &str, prompt: u32, now: i64) -> UploadOutcome {
    wf.upload(
        UploadRequest {
            owner: owner.into(),
            prompt_index: Some(prompt),
            title: format!("{owner} p{prompt}"),
            description: String::new(),
            qualities: qualities(),
            media: BTreeMap::new(),
        },
        now,
    )
    .unwrap()
}

fn video_id(outcome: UploadOutcome) -> String {
    match outcome {
        UploadOutcome::Accepted { video_id, .. } => video_id,
        other => panic!("upload refused: {other:?}"),
    }
}

fn review(reviewer: &str, video: &str, comments: usize) -> ReviewSubmission {
    ReviewSubmission {
        reviewer: reviewer.into(),
        video_id: video.into(),
        comments: (0..comments)
            .map(|i| CommentDraft {
                text: format!("comment {i} from {reviewer}"),
                category: Category::Speech,
                video_timestamp: Some(i as f64),
            })
            .collect(),
        ratings: qualities().into_iter().map(|q| (q, 4)).collect(),
        overall: None,
    }
}

/// Users `owner` and `p0..pn`, each peer with one ready prompt-1 video.
fn world(peers: usize) -> (Workflow, Vec<String>) {
    let mut wf = Workflow::new(WorkflowConfig::with_schedule(0, TWO_DAYS)).unwrap();
    wf.register_user("owner", Condition::Treatment, None, 1).unwrap();
    let mut videos = Vec::new();
    for i in 0..peers {
        let id = format!("p{i}");
        wf.register_user(&id, Condition::Control, None, 1).unwrap();
        let v = video_id(upload(&mut wf, &id, 1, 10 + i as i64));
        wf.mark_analyzed(&v, 10 + i as i64).unwrap();
        videos.push(v);
    }
    (wf, videos)
}

#[test]
fn first_prompt_is_open_after_release() {
    let (wf, _) = world(0);
    assert!(wf.can_upload("owner", 1, 5).unwrap().allowed);
}

#[test]
fn second_prompt_needs_three_reviews() {
    let (mut wf, videos) = world(3);
    for v in &videos[..2] {
        wf.submit_review(review("owner", v, 3), 100).unwrap();
    }
    let gate = wf.can_upload("owner", 2, TWO_DAYS + 1).unwrap();
    assert!(!gate.allowed);
    assert_eq!(gate.reason(), "reviews 2/3");
    assert_eq!(
        gate.reasons,
        vec![GateReason::Reviews { done: 2, required: 3 }]
    );
}

#[test]
fn second_prompt_waits_for_release() {
    let (mut wf, videos) = world(3);
    for v in &videos {
        wf.submit_review(review("owner", v, 3), 100).unwrap();
    }
    let gate = wf.can_upload("owner", 2, TWO_DAYS - 1).unwrap();
    assert_eq!(gate.reason(), "not released");
    assert!(wf.can_upload("owner", 2, TWO_DAYS).unwrap().allowed);
}

#[test]
fn unknown_prompt_is_not_found() {
    let (wf, _) = world(0);
    assert!(matches!(wf.can_upload("owner", 6, 0), Err(Error::NotFound(_))));
    let mut wf = wf;
    assert!(matches!(wf.release_prompt(6, 0), Err(Error::NotFound(_))));
}

#[test]
fn upload_refused_when_gate_closed() {
    let (mut wf, _) = world(0);
    match upload(&mut wf, "owner", 2, TWO_DAYS + 5) {
        UploadOutcome::GateClosed { reason, .. } => assert_eq!(reason, "reviews 0/3"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn upload_requires_five_distinct_known_qualities() {
    let (mut wf, _) = world(0);
    let mut req = UploadRequest {
        owner: "owner".into(),
        prompt_index: None,
        title: "t".into(),
        description: "d".into(),
        qualities: qualities()[..4].to_vec(),
        media: BTreeMap::new(),
    };
    let reason = |o: UploadOutcome| match o {
        UploadOutcome::InvalidQualities { reason } => reason,
        other => panic!("{other:?}"),
    };
    assert_eq!(reason(wf.upload(req.clone(), 5).unwrap()), "qualities: expected 5");
    req.qualities.push(req.qualities[0].clone());
    assert!(reason(wf.upload(req.clone(), 5).unwrap()).contains("twice"));
    req.qualities[4] = "juggling".into();
    assert!(reason(wf.upload(req, 5).unwrap()).contains("unknown"));
}

#[test]
fn default_prompt_is_latest_released() {
    let (mut wf, videos) = world(3);
    for v in &videos {
        wf.submit_review(review("owner", v, 3), 100).unwrap();
    }
    let mut req = UploadRequest {
        owner: "owner".into(),
        prompt_index: None,
        title: "t".into(),
        description: String::new(),
        qualities: qualities(),
        media: BTreeMap::new(),
    };
    req.prompt_index = None;
    match wf.upload(req, TWO_DAYS + 60).unwrap() {
        UploadOutcome::Accepted { prompt_index, .. } => assert_eq!(prompt_index, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn review_acceptance_rules() {
    let (mut wf, videos) = world(2);
    let own = video_id(upload(&mut wf, "owner", 1, 50));

    let outcome = wf.submit_review(review("owner", &videos[0], 3), 60).unwrap();
    assert!(matches!(outcome, ReviewOutcome::Accepted { counted: true, progress: 1, .. }));

    let reject = |o: ReviewOutcome| match o {
        ReviewOutcome::Rejected { reason } => reason,
        other => panic!("{other:?}"),
    };
    assert_eq!(reject(wf.submit_review(review("owner", &videos[1], 2), 61).unwrap()), "comments 2/3");
    assert_eq!(reject(wf.submit_review(review("owner", &own, 3), 61).unwrap()), "own video");

    let mut partial = review("owner", &videos[1], 3);
    partial.ratings.pop_first();
    assert_eq!(reject(wf.submit_review(partial, 61).unwrap()), "ratings 4/5");

    let mut extra = review("owner", &videos[1], 3);
    extra.ratings.insert("posture".into(), 3);
    assert!(reject(wf.submit_review(extra, 61).unwrap()).contains("not a selected quality"));

    let mut zero = review("owner", &videos[1], 3);
    *zero.ratings.values_mut().next().unwrap() = 0;
    assert!(reject(wf.submit_review(zero, 61).unwrap()).contains("1-5"));

    // a second review of the same video keeps its content but not progress
    let again = wf.submit_review(review("owner", &videos[0], 4), 70).unwrap();
    assert!(matches!(again, ReviewOutcome::Accepted { counted: false, progress: 1, .. }));
    assert_eq!(wf.peer_feedback(&videos[0]).unwrap().comments.len(), 7);
    assert_eq!(wf.notifications("p0").unwrap().len(), 2);
}

#[test]
fn overall_defaults_to_rounded_mean() {
    let (mut wf, videos) = world(1);
    let mut r = review("owner", &videos[0], 3);
    for (stars, v) in [5, 4, 4, 3, 3].into_iter().zip(r.ratings.values_mut()) {
        *v = stars;
    }
    wf.submit_review(r, 60).unwrap();
    // mean 3.8
    assert_eq!(wf.reviews()[0].overall, 4);
}

#[test]
fn notifications_do_not_name_the_reviewer() {
    let (mut wf, videos) = world(1);
    wf.submit_review(review("owner", &videos[0], 3), 60).unwrap();
    let notes = wf.notifications("p0").unwrap();
    assert_eq!(notes.len(), 1);
    assert!(!serde_json::to_string(&notes).unwrap().contains("owner"));
}

#[test]
fn feed_lists_unreviewed_peer_videos_newest_first() {
    let (mut wf, videos) = world(10);
    let feed = wf.feed_for_user("owner").unwrap();
    assert_eq!(feed.len(), 10);
    assert_eq!(feed[0].video_id, videos[9]);
    assert!(feed.iter().all(|v| v.owner.starts_with("peer-")));

    wf.submit_review(review("owner", &videos[3], 3), 100).unwrap();
    let feed = wf.feed_for_user("owner").unwrap();
    assert_eq!(feed.len(), 9);
    assert!(feed.iter().all(|v| v.video_id != videos[3]));

    let pending = video_id(upload(&mut wf, "p0", 1, 200));
    assert!(wf.feed_for_user("owner").unwrap().iter().all(|v| v.video_id != pending));
    assert!(wf.feed_for_user("p0").unwrap().iter().all(|v| !v.owner.contains("p0")));
}

#[test]
fn pseudonyms_are_stable_per_viewer() {
    let (mut wf, _) = world(2);
    wf.register_user("viewer2", Condition::Control, None, 5).unwrap();
    let a = wf.feed_for_user("owner").unwrap();
    let b = wf.feed_for_user("owner").unwrap();
    let c = wf.feed_for_user("viewer2").unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].owner, a[1].owner);
    assert_ne!(a[0].owner, c[0].owner);
}

#[test]
fn final_video_is_latest_upload() {
    let (mut wf, _) = world(0);
    let ids: Vec<String> = (1..=3).map(|t| video_id(upload(&mut wf, "owner", 1, t))).collect();
    assert_eq!(wf.final_videos(1)["owner"], ids[2]);
    assert!(wf.final_videos(2).is_empty());
}

#[test]
fn per_cycle_gate_ignores_reviews_before_unlock() {
    for (mode, expect_open) in [(GateMode::PerCycle, false), (GateMode::Cumulative, true)] {
        let mut config = WorkflowConfig::with_schedule(0, TWO_DAYS);
        config.gate_mode = mode;
        let mut wf = Workflow::new(config).unwrap();
        wf.register_user("u", Condition::Control, None, 0).unwrap();
        let mut videos = Vec::new();
        for i in 0..6 {
            let p = format!("p{i}");
            wf.register_user(&p, Condition::Control, None, 0).unwrap();
            let v = video_id(upload(&mut wf, &p, 1, 1));
            wf.mark_analyzed(&v, 1).unwrap();
            videos.push(v);
        }
        // six reviews, all before prompt 2 is released
        for v in &videos {
            wf.submit_review(review("u", v, 3), DAY).unwrap();
        }
        let gate = wf.can_upload("u", 3, 2 * TWO_DAYS).unwrap();
        assert_eq!(gate.allowed, expect_open, "{mode:?}: {}", gate.reason());
        if !expect_open {
            assert_eq!(gate.reason(), "reviews 0/3");
        }
    }
}

#[test]
fn manual_release_opens_prompt_early() {
    let (mut wf, videos) = world(3);
    for v in &videos {
        wf.submit_review(review("owner", v, 3), 100).unwrap();
    }
    assert!(!wf.can_upload("owner", 2, 200).unwrap().allowed);
    wf.release_prompt(2, 150).unwrap();
    assert!(wf.can_upload("owner", 2, 200).unwrap().allowed);
    assert_eq!(wf.current_prompt(200), Some(2));
}

#[test]
fn leaderboard_refreshes_on_schedule() {
    let (mut wf, videos) = world(2);
    wf.submit_review(review("owner", &videos[0], 3), 100).unwrap();
    let board = wf.leaderboard(TWO_DAYS - 1);
    assert_eq!(board.refreshed_at, 0);
    assert!(board.entries.is_empty());
    let board = wf.leaderboard(TWO_DAYS);
    assert_eq!(board.entries.len(), 1);
    assert_eq!(board.entries[0].user_id, "p0");
    assert_eq!(board.entries[0].mean_rating, 4.0);
}

#[test]
fn export_covers_final_videos_only() {
    let (mut wf, videos) = world(1);
    wf.submit_review(review("owner", &videos[0], 3), 100).unwrap();
    let newer = video_id(upload(&mut wf, "p0", 1, 200));
    wf.mark_analyzed(&newer, 201).unwrap();
    assert!(wf.ratings_export().is_empty());
    wf.submit_review(review("owner", &newer, 3), 300).unwrap();
    let rows = wf.ratings_export();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].video_id, newer);
    assert_eq!(rows[0].condition, Condition::Control);
}

#[test]
fn replay_rebuilds_identical_state() {
    let (mut wf, videos) = world(4);
    for v in &videos[..3] {
        wf.submit_review(review("owner", v, 3), 100).unwrap();
    }
    let text: Vec<String> = wf.log().iter().map(|e| serde_json::to_string(e).unwrap()).collect();
    assert!(text[0].contains("\"kind\":\"user_registered\""));
    let records: Vec<EventRecord> = text.iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    let again = Workflow::replay(wf.config().clone(), records.clone()).unwrap();
    assert_eq!(again.log(), wf.log());
    assert_eq!(again.feed_for_user("owner").unwrap(), wf.feed_for_user("owner").unwrap());
    assert_eq!(again.reviews(), wf.reviews());

    let mut gap = records.clone();
    gap.remove(2);
    assert!(Workflow::replay(wf.config().clone(), gap).is_err());
}

#[test]
fn time_never_runs_backwards_in_the_log() {
    let (mut wf, videos) = world(1);
    wf.submit_review(review("owner", &videos[0], 3), 500).unwrap();
    wf.release_prompt(2, 10).unwrap();
    let last = wf.log().last().unwrap();
    assert_eq!(last.timestamp, 500);
}

#[test]
fn anonymize_strips_authors() {
    let json = include_str!("data/control-bundle.json");
    let bundle = FeedbackBundle::from_json(json).unwrap();
    assert!(bundle.comments.iter().all(|c| c.author_id.is_some()));
    let clean = anonymize_feedback(bundle.clone());
    assert!(clean.comments.iter().all(|c| c.author_id.is_none()));
    assert_eq!(
        clean.comments.iter().map(|c| &c.text).collect::<Vec<_>>(),
        bundle.comments.iter().map(|c| &c.text).collect::<Vec<_>>()
    );
    let out = clean.to_canonical_json().unwrap();
    for id in ["rater-ann", "rater-ben", "rater-cho"] {
        assert!(!out.contains(id));
    }
}

#[test]
fn final_videos_survive_reingestion() {
    let (mut wf, _) = world(3);
    video_id(upload(&mut wf, "p0", 1, 40));
    video_id(upload(&mut wf, "p1", 1, 41));
    let finals = wf.final_videos(1);
    assert_eq!(finals, wf.final_videos(1));
    let once = Workflow::replay(wf.config().clone(), wf.log().to_vec()).unwrap();
    let twice = Workflow::replay(wf.config().clone(), once.log().to_vec()).unwrap();
    assert_eq!(once.final_videos(1), finals);
    assert_eq!(twice.final_videos(1), finals);
}

#[test]
fn every_accepted_review_notifies_the_owner_once() {
    let (mut wf, videos) = world(3);
    let mut accepted = 0;
    for (i, v) in videos.iter().enumerate() {
        for c in [2, 3, 3] {
            if let ReviewOutcome::Accepted { .. } = wf.submit_review(review("owner", v, c), 100 + i as i64).unwrap() {
                accepted += 1;
            }
        }
    }
    assert_eq!(accepted, 6);
    assert_eq!(wf.all_notifications().len(), accepted);
}
