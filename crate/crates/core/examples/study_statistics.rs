//! Computes the study statistics (agreement, rating trajectories, paired
//! improvement and effect sizes) from a ratings export.
//!
//! ```text
//! cargo run -p podium --example study_statistics [-- ratings.csv]
//! ```
//!
//! Without an argument a small synthetic cohort is generated.

use std::fs::File;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use podium::stats::{build_report, read_ratings_csv, RatingRow};
use podium::workflow::Condition;

fn synthetic() -> Vec<RatingRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rows = Vec::new();
    for u in 0..16 {
        let condition = if u % 2 == 0 { Condition::Treatment } else { Condition::Control };
        let skill: f64 = rng.random_range(2.5..3.8);
        for prompt in 1..=5u32 {
            let gain = if condition == Condition::Treatment { 0.15 } else { 0.03 } * (prompt - 1) as f64;
            for r in 0..4 {
                let rater = (u + 1 + r * 3) % 16;
                let noisy = skill + gain + rng.random_range(-0.8..0.8);
                rows.push(RatingRow {
                    rater_id: format!("u{rater}"),
                    video_id: format!("u{u}-p{prompt}"),
                    user_id: format!("u{u}"),
                    prompt_index: prompt,
                    condition,
                    overall_rating: noisy.round().clamp(1.0, 5.0) as u8,
                    timestamp: (prompt * 1000 + r) as i64,
                });
            }
        }
    }
    rows
}

fn main() -> podium::Result<()> {
    let rows = match std::env::args().nth(1) {
        Some(path) => read_ratings_csv(File::open(path)?)?,
        None => synthetic(),
    };
    let report = build_report(&rows, 5);
    print!("{}", report.render_text());
    Ok(())
}
