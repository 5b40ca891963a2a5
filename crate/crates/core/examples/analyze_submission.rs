//! Runs the full analysis on a submission directory and prints the headline
//! numbers from the resulting feedback bundle.
//!
//! ```text
//! cargo run -p podium --example analyze_submission [-- DIR [OUT.json]]
//! ```
//!
//! Defaults to the committed fixture under `fixtures/submission`.

use std::path::PathBuf;

use podium::pipeline::{analyze_submission_dir, AnalysisConfig};

fn main() -> podium::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/submission"));
    let bundle = analyze_submission_dir(&dir, &AnalysisConfig::default())?;

    println!("video {} ({})", bundle.video_id, bundle.condition);
    println!("overall {:.2} from {} ratings", bundle.overall.mean.unwrap_or(f64::NAN), bundle.overall.count);
    for q in &bundle.ratings_summary {
        println!("  {:<24} {:.2} ({} ratings)", q.quality, q.mean.unwrap_or(f64::NAN), q.count);
    }
    if let Some(summary) = &bundle.summary {
        let h = &summary.headline;
        let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.1}"));
        println!("smile {}  movement {}", show(h.mean_smile), show(h.mean_movement));
        println!("loudness {} dB  pitch {} Hz", show(h.mean_loudness_db), show(h.mean_pitch_hz));
        println!(
            "unique words {:.0}%  fillers {}  pace {} wpm",
            100.0 * h.unique_word_ratio,
            h.filler_count,
            show(h.words_per_minute)
        );
        if let Some(top) = &summary.top_positive {
            println!("most helpful praise: {}", top.comment.text);
        }
        if let Some(top) = &summary.top_negative {
            println!("most helpful critique: {}", top.comment.text);
        }
    }
    if let Some(out) = args.next() {
        std::fs::write(&out, bundle.to_canonical_json()?)?;
        println!("bundle written to {out}");
    }
    Ok(())
}
