//! Walks a small cohort through the upload/review cycle and shows when the
//! review gate opens for each prompt.

use std::collections::BTreeMap;

use podium::moderation::Category;
use podium::workflow::{
    CommentDraft, Condition, ReviewOutcome, ReviewSubmission, UploadOutcome, UploadRequest, Workflow, WorkflowConfig,
    DEFAULT_QUALITIES, TWO_DAYS,
};

const HOUR: i64 = 3600;

fn upload(wf: &mut Workflow, owner: &str, prompt: u32, now: i64) -> podium::Result<Option<String>> {
    let outcome = wf.upload(
        UploadRequest {
            owner: owner.into(),
            prompt_index: Some(prompt),
            title: format!("Prompt {prompt} pitch"),
            description: String::new(),
            qualities: DEFAULT_QUALITIES[..5].iter().map(|q| q.to_string()).collect(),
            media: BTreeMap::new(),
        },
        now,
    )?;
    Ok(match outcome {
        UploadOutcome::Accepted { video_id, .. } => {
            wf.mark_analyzed(&video_id, now)?;
            Some(video_id)
        }
        UploadOutcome::GateClosed { reason, .. } => {
            println!("  {owner} cannot upload prompt {prompt}: {reason}");
            None
        }
        UploadOutcome::InvalidQualities { reason } => panic!("{reason}"),
    })
}

fn review(wf: &mut Workflow, reviewer: &str, video_id: &str, now: i64) -> podium::Result<()> {
    let qualities = wf.video(video_id)?.qualities.clone();
    let submission = ReviewSubmission {
        reviewer: reviewer.into(),
        video_id: video_id.into(),
        comments: ["Clear opening.", "Slow down a little.", "Good eye contact."]
            .iter()
            .map(|t| CommentDraft { text: t.to_string(), category: Category::Speech, video_timestamp: None })
            .collect(),
        ratings: qualities.into_iter().map(|q| (q, 4)).collect(),
        overall: None,
    };
    if let ReviewOutcome::Rejected { reason } = wf.submit_review(submission, now)? {
        println!("  review rejected: {reason}");
    }
    Ok(())
}

fn main() -> podium::Result<()> {
    let mut wf = Workflow::new(WorkflowConfig::with_schedule(0, TWO_DAYS))?;
    let users = ["ana", "ben", "chen", "dev"];
    for (i, u) in users.iter().enumerate() {
        let condition = if i % 2 == 0 { Condition::Treatment } else { Condition::Control };
        wf.register_user(u, condition, None, 0)?;
    }

    let mut now = HOUR;
    println!("day 0: everyone uploads prompt 1");
    for u in users {
        upload(&mut wf, u, 1, now)?;
        now += HOUR;
    }

    now = TWO_DAYS + HOUR;
    println!("day 2: prompt 2 released, nobody has reviewed yet");
    upload(&mut wf, "ana", 2, now)?;

    println!("ana reviews the three videos in her feed");
    for item in wf.feed_for_user("ana")? {
        now += HOUR;
        review(&mut wf, "ana", &item.video_id, now)?;
        println!("  reviewed {} by {}, progress {}", item.title, item.owner, wf.progress("ana")?);
    }
    if let Some(v) = upload(&mut wf, "ana", 2, now)? {
        println!("  ana uploaded {v} for prompt 2");
    }
    let gate = wf.can_upload("ana", 3, 2 * TWO_DAYS + HOUR)?;
    println!("prompt 3 for ana after release: {}", if gate.allowed { "open".into() } else { gate.reason() });

    println!("notifications for ben:");
    for n in wf.notifications("ben")? {
        println!("  {}", n.message);
    }
    let board = wf.leaderboard(2 * TWO_DAYS);
    println!("leaderboard as of hour {}:", board.refreshed_at / HOUR);
    for e in board.entries {
        println!("  #{} {} {:.2} ({} ratings)", e.rank, e.user_id, e.mean_rating, e.ratings);
    }
    Ok(())
}
