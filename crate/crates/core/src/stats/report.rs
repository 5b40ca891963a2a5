use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::agreement::{krippendorff_alpha_ordinal, SparseRatingMatrix};
use super::effect::{cliffs_delta, cohens_d, paired_t_test, PairedSamples, TTest};
use super::export::{improvement_prepared, prepare, trajectory_prepared, DeltaSummary, RatingRow, TrajectoryPoint, UserDelta};
use crate::workflow::Condition;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub raters: usize,
    pub videos: usize,
    pub ratings: usize,
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_error: Option<String>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub improvement: DeltaSummary,
    /// First versus last prompt, per user.
    pub paired_t: Option<TTest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paired_t_error: Option<String>,
}

/// Treatment deltas compared against control deltas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSizes {
    pub cohens_d: Option<f64>,
    pub cliffs_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub schema_version: u32,
    pub prompt_count: u32,
    pub conditions: BTreeMap<Condition, ConditionReport>,
    pub users: Vec<UserDelta>,
    pub effect_sizes: EffectSizes,
    pub warnings: Vec<String>,
}

pub fn build_report(rows: &[RatingRow], prompt_count: u32) -> StatsReport {
    let (rows, mut warnings) = prepare(rows);
    let improvement = improvement_prepared(&rows, prompt_count);
    warnings.extend(improvement.warnings.iter().cloned());

    let mut conditions = BTreeMap::new();
    for condition in [Condition::Treatment, Condition::Control] {
        let subset: Vec<RatingRow> = rows.iter().filter(|r| r.condition == condition).cloned().collect();
        if subset.is_empty() {
            continue;
        }
        let trajectory = trajectory_prepared(&subset, prompt_count, &mut warnings);
        let matrix = SparseRatingMatrix::from_triples(
            subset
                .iter()
                .map(|r| (r.rater_id.as_str(), r.video_id.as_str(), r.overall_rating)),
        )
        .expect("export ratings are validated on read");
        let alpha = krippendorff_alpha_ordinal(&matrix);
        let users: Vec<&UserDelta> = improvement.users.iter().filter(|u| u.condition == condition).collect();
        let pre: Vec<f64> = users.iter().map(|u| u.initial).collect();
        let post: Vec<f64> = users.iter().map(|u| u.final_rating).collect();
        let t = PairedSamples::new(&pre, &post).and_then(|s| paired_t_test(&s));
        conditions.insert(
            condition,
            ConditionReport {
                raters: matrix.raters().len(),
                videos: matrix.items().len(),
                ratings: subset.len(),
                alpha: alpha.as_ref().ok().copied(),
                alpha_error: alpha.err().map(|e| e.to_string()),
                trajectory,
                improvement: improvement.summary.get(&condition).cloned().unwrap_or_default(),
                paired_t: t.as_ref().ok().copied(),
                paired_t_error: t.err().map(|e| e.to_string()),
            },
        );
    }

    let treated = improvement.deltas(Condition::Treatment);
    let control = improvement.deltas(Condition::Control);
    let mut errors = Vec::new();
    let d = cohens_d(&treated, &control).map_err(|e| errors.push(format!("cohens_d: {e}"))).ok();
    let delta = cliffs_delta(&treated, &control)
        .map_err(|e| errors.push(format!("cliffs_delta: {e}")))
        .ok();

    StatsReport {
        schema_version: REPORT_SCHEMA_VERSION,
        prompt_count,
        conditions,
        users: improvement.users,
        effect_sizes: EffectSizes {
            cohens_d: d,
            cliffs_delta: delta,
            errors,
        },
        warnings,
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.digits$}"))
}

impl StatsReport {
    /// Plain-text tables for terminals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (condition, r) in &self.conditions {
            let _ = writeln!(
                out,
                "{condition}: {} ratings, {} raters x {} videos, alpha (ordinal) {}",
                r.ratings,
                r.raters,
                r.videos,
                opt(r.alpha, 3)
            );
            let _ = writeln!(out, "  {:>6}  {:>6}  {:>6}  {:>4}", "prompt", "mean", "se", "n");
            for p in &r.trajectory {
                let _ = writeln!(
                    out,
                    "  {:>6}  {:>6.3}  {:>6}  {:>4}",
                    p.prompt_index,
                    p.mean,
                    opt(p.standard_error, 3),
                    p.n
                );
            }
            let i = &r.improvement;
            let _ = writeln!(
                out,
                "  change first->last: n {}, mean {}, regressed {}, same {}, improved {}",
                i.n,
                opt(i.mean, 3),
                i.negative,
                i.zero,
                i.positive
            );
            match &r.paired_t {
                Some(t) => {
                    let _ = writeln!(out, "  paired t: t {:.4}, df {}, p {:.6}", t.t, t.df, t.p);
                }
                None => {
                    let _ = writeln!(out, "  paired t: {}", r.paired_t_error.as_deref().unwrap_or("-"));
                }
            }
        }
        let _ = writeln!(
            out,
            "treatment vs control change: Cohen's d {}, Cliff's delta {}",
            opt(self.effect_sizes.cohens_d, 3),
            opt(self.effect_sizes.cliffs_delta, 3)
        );
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(rater: &str, user: &str, condition: Condition, prompt: u32, stars: u8) -> RatingRow {
        RatingRow {
            rater_id: rater.into(),
            video_id: format!("{user}-{prompt}"),
            user_id: user.into(),
            prompt_index: prompt,
            condition,
            overall_rating: stars,
            timestamp: prompt as i64,
        }
    }

    #[test]
    fn report_covers_both_conditions() {
        let mut rows = Vec::new();
        for (u, c, a, b) in [
            ("t1", Condition::Treatment, 3, 5),
            ("t2", Condition::Treatment, 2, 4),
            ("t3", Condition::Treatment, 3, 3),
            ("c1", Condition::Control, 3, 3),
            ("c2", Condition::Control, 4, 3),
            ("c3", Condition::Control, 2, 3),
        ] {
            for rater in ["x", "y"] {
                rows.push(row(rater, u, c, 1, a));
                rows.push(row(rater, u, c, 2, b));
            }
        }
        let report = build_report(&rows, 2);
        assert_eq!(report.conditions.len(), 2);
        let t = &report.conditions[&Condition::Treatment];
        assert_eq!(t.improvement.positive, 2);
        assert!(t.paired_t.is_some());
        assert_eq!(t.alpha, Some(1.0));
        assert!(report.effect_sizes.cohens_d.unwrap() > 0.0);
        let text = report.render_text();
        assert!(text.contains("treatment: 12 ratings"));
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"schema_version\":1"));
    }
}
