//! Regenerates the committed fixture submission and its expected bundles.
//!
//! ```text
//! cargo run -p podium --example generate_fixture [-- OUT_DIR]
//! ```
//!
//! Writes `OUT_DIR/submission/` (treatment condition, with trained models)
//! and `OUT_DIR/bundles/{treatment,control}.json`. Defaults to the crate's
//! `fixtures/` directory.

use std::fs;
use std::path::PathBuf;

use podium::fixture::{FixtureSubmission, FIXTURE_SEED};
use podium::pipeline::{analyze_submission_dir, layout, AnalysisConfig};
use podium::workflow::Condition;

fn main() -> podium::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let config = AnalysisConfig::default();
    let bundles = out.join("bundles");
    fs::create_dir_all(&bundles)?;

    let submission = out.join("submission");
    if submission.exists() {
        fs::remove_dir_all(&submission)?;
    }
    FixtureSubmission::generate(FIXTURE_SEED, Condition::Treatment)?.write(&submission, FIXTURE_SEED)?;
    let treatment = analyze_submission_dir(&submission, &config)?;
    fs::write(bundles.join("treatment.json"), treatment.to_canonical_json()?)?;

    // The control bundle comes from the same media with the condition flipped.
    let scratch = tempdir(&out)?;
    FixtureSubmission::generate(FIXTURE_SEED, Condition::Control)?.write(&scratch, FIXTURE_SEED)?;
    fs::remove_dir_all(scratch.join(layout::MODELS))?;
    let control = analyze_submission_dir(&scratch, &config)?;
    fs::write(bundles.join("control.json"), control.to_canonical_json()?)?;
    fs::remove_dir_all(&scratch)?;

    println!("wrote {}", submission.display());
    println!("wrote {}", bundles.join("treatment.json").display());
    println!("wrote {}", bundles.join("control.json").display());
    Ok(())
}

fn tempdir(parent: &std::path::Path) -> std::io::Result<PathBuf> {
    let dir = parent.join(".control-scratch");
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}
