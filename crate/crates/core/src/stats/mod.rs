//! Agreement, significance and effect-size statistics over rating exports.

mod agreement;
mod distribution;
mod effect;
mod export;
mod report;

pub use agreement::{krippendorff_alpha_ordinal, SparseRatingMatrix};
pub use distribution::{ln_gamma, regularized_incomplete_beta, student_t_two_tailed};
pub use effect::{cliffs_delta, cohens_d, paired_t_test, PairedSamples, TTest};
pub use export::{
    dedupe_latest, improvement_deltas, read_ratings_csv, trajectory, write_ratings_csv, DeltaSummary,
    ImprovementDeltas, RatingRow, TrajectoryPoint, UserDelta,
};
pub use report::{build_report, ConditionReport, EffectSizes, StatsReport, REPORT_SCHEMA_VERSION};

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n - 1 denominator).
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
