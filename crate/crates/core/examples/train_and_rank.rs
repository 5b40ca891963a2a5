//! Trains the helpfulness and sentiment models from a labeled CSV, then
//! scores and ranks a handful of new comments.
//!
//! ```text
//! cargo run -p podium --example train_and_rank [-- training.csv]
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::path::PathBuf;

use podium::moderation::{rank_comments, read_training_csv, train_moderation, Category, Comment};

fn main() -> podium::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/submission/training.csv"));
    let rows = read_training_csv(File::open(&path)?)?;
    let artifacts = train_moderation(&rows, &|_| None, 11)?;

    for (category, m) in &artifacts.metrics.helpfulness {
        let r2 = m.r_squared.map_or("-".into(), |r| format!("{r:.3}"));
        println!("{category:<13} {} examples, R^2 {r2}", m.examples);
    }
    if let Some(report) = &artifacts.metrics.sentiment {
        println!(
            "sentiment: {} train / {} held out, accuracy {:.3}",
            report.train,
            report.test,
            report.accuracy.unwrap_or(f64::NAN)
        );
    }

    let moderator = artifacts.into_moderator().expect("sentiment model trained");
    let drafts = [
        ("Great eye contact in the opening.", Category::Friendliness),
        ("Speaking too fast when you described your project, try to keep it consistent.", Category::Speech),
        ("ok", Category::Speech),
        ("Natural hand gestures throughout the video.", Category::Movement),
        ("Stiff posture near the end.", Category::Movement),
    ];
    let no_media = BTreeMap::new();
    let scored = drafts
        .iter()
        .enumerate()
        .map(|(i, (text, category))| {
            let comment = Comment {
                id: format!("c{i}"),
                video_id: "demo".into(),
                author_id: None,
                text: text.to_string(),
                category: *category,
                video_timestamp: None,
                created_at: i as i64,
            };
            moderator.score(&comment, &no_media)
        })
        .collect::<podium::Result<Vec<_>>>()?;

    let ranked = rank_comments(scored, 2);
    for (i, s) in ranked.iter().enumerate() {
        let marker = if i < ranked.top.len() { "*" } else { " " };
        println!("{marker} {:>5.1} {:<8} {}", s.helpfulness, s.sentiment.as_str(), s.comment.text);
    }
    Ok(())
}
