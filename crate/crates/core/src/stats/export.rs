use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{mean, sample_variance};
use crate::workflow::Condition;
use crate::{Error, Result};

/// One overall rating of a final video, as exported by the workflow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRow {
    pub rater_id: String,
    pub video_id: String,
    /// Owner of the rated video.
    pub user_id: String,
    pub prompt_index: u32,
    pub condition: Condition,
    pub overall_rating: u8,
    pub timestamp: i64,
}

pub fn read_ratings_csv<R: Read>(reader: R) -> Result<Vec<RatingRow>> {
    let mut rows = Vec::new();
    for (line, row) in csv::Reader::from_reader(reader).deserialize::<RatingRow>().enumerate() {
        let row = row?;
        if !(1..=5).contains(&row.overall_rating) {
            return Err(Error::Format(format!(
                "ratings export row {}: overall_rating {} outside 1-5",
                line + 1,
                row.overall_rating
            )));
        }
        if row.prompt_index == 0 {
            return Err(Error::Format(format!("ratings export row {}: prompt_index is 1-based", line + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_ratings_csv<W: Write>(writer: W, rows: &[RatingRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Keeps the latest rating per (rater, video); among equal timestamps the
/// later row wins. Row order of the survivors is preserved.
pub fn dedupe_latest(rows: &[RatingRow]) -> (Vec<RatingRow>, Vec<String>) {
    let mut winner: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let key = (row.rater_id.as_str(), row.video_id.as_str());
        if let Some(&prev) = winner.get(&key) {
            warnings.push(format!(
                "rater {} rated video {} more than once; keeping the latest",
                row.rater_id, row.video_id
            ));
            if row.timestamp >= rows[prev].timestamp {
                winner.insert(key, i);
            }
        } else {
            winner.insert(key, i);
        }
    }
    let keep: BTreeSet<usize> = winner.into_values().collect();
    let kept = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, r)| r.clone())
        .collect();
    (kept, warnings)
}

/// Deduplicates and keeps one video per (user, prompt). Exports written by
/// the workflow already contain final videos only; if several appear, the
/// one with the most recent rating is kept.
pub(crate) fn prepare(rows: &[RatingRow]) -> (Vec<RatingRow>, Vec<String>) {
    let (rows, mut warnings) = dedupe_latest(rows);
    let mut latest: BTreeMap<(&str, u32), BTreeMap<&str, i64>> = BTreeMap::new();
    for r in &rows {
        let t = latest
            .entry((r.user_id.as_str(), r.prompt_index))
            .or_default()
            .entry(r.video_id.as_str())
            .or_insert(i64::MIN);
        *t = (*t).max(r.timestamp);
    }
    let mut chosen: BTreeSet<&str> = BTreeSet::new();
    for ((user, prompt), videos) in &latest {
        let (video, _) = videos
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("non-empty");
        if videos.len() > 1 {
            warnings.push(format!(
                "user {user} has {} rated videos for prompt {prompt}; using {video}",
                videos.len()
            ));
        }
        chosen.insert(video);
    }
    let kept = rows
        .iter()
        .filter(|r| chosen.contains(r.video_id.as_str()))
        .cloned()
        .collect();
    (kept, warnings)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub condition: Condition,
    pub prompt_index: u32,
    pub mean: f64,
    /// Standard error of the mean; absent for a single rating.
    pub standard_error: Option<f64>,
    pub n: usize,
}

/// Mean overall rating per condition and prompt over final videos.
pub fn trajectory(rows: &[RatingRow], prompt_count: u32) -> (Vec<TrajectoryPoint>, Vec<String>) {
    let (rows, mut warnings) = prepare(rows);
    let points = trajectory_prepared(&rows, prompt_count, &mut warnings);
    (points, warnings)
}

pub(crate) fn trajectory_prepared(
    rows: &[RatingRow],
    prompt_count: u32,
    warnings: &mut Vec<String>,
) -> Vec<TrajectoryPoint> {
    let mut groups: BTreeMap<(Condition, u32), Vec<f64>> = BTreeMap::new();
    for r in rows {
        if r.prompt_index > prompt_count {
            warnings.push(format!(
                "rating of video {} references unknown prompt {}",
                r.video_id, r.prompt_index
            ));
            continue;
        }
        groups
            .entry((r.condition, r.prompt_index))
            .or_default()
            .push(r.overall_rating as f64);
    }
    let conditions: BTreeSet<Condition> = rows.iter().map(|r| r.condition).collect();
    let mut points = Vec::new();
    for condition in conditions {
        for prompt in 1..=prompt_count {
            match groups.get(&(condition, prompt)) {
                None => warnings.push(format!("no {condition} ratings for prompt {prompt}")),
                Some(xs) => points.push(TrajectoryPoint {
                    condition,
                    prompt_index: prompt,
                    mean: mean(xs),
                    standard_error: (xs.len() >= 2)
                        .then(|| (sample_variance(xs) / xs.len() as f64).sqrt()),
                    n: xs.len(),
                }),
            }
        }
    }
    points
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDelta {
    pub user_id: String,
    pub condition: Condition,
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_rating: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaSummary {
    pub n: usize,
    pub mean: Option<f64>,
    /// Regressed.
    pub negative: usize,
    /// Stayed the same.
    pub zero: usize,
    /// Improved.
    pub positive: usize,
}

impl DeltaSummary {
    pub fn from_deltas(deltas: &[f64]) -> Self {
        Self {
            n: deltas.len(),
            mean: (!deltas.is_empty()).then(|| mean(deltas)),
            negative: deltas.iter().filter(|&&d| d < 0.0).count(),
            zero: deltas.iter().filter(|&&d| d == 0.0).count(),
            positive: deltas.iter().filter(|&&d| d > 0.0).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ImprovementDeltas {
    pub users: Vec<UserDelta>,
    pub summary: BTreeMap<Condition, DeltaSummary>,
    pub warnings: Vec<String>,
}

impl ImprovementDeltas {
    pub fn deltas(&self, condition: Condition) -> Vec<f64> {
        self.users
            .iter()
            .filter(|u| u.condition == condition)
            .map(|u| u.delta)
            .collect()
    }
}

/// Change in mean received rating between the first and last prompt.
pub fn improvement_deltas(rows: &[RatingRow], prompt_count: u32) -> ImprovementDeltas {
    let (rows, mut warnings) = prepare(rows);
    let mut out = improvement_prepared(&rows, prompt_count);
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    out
}

pub(crate) fn improvement_prepared(rows: &[RatingRow], prompt_count: u32) -> ImprovementDeltas {
    let mut per_user: BTreeMap<&str, (Condition, BTreeMap<u32, Vec<f64>>)> = BTreeMap::new();
    for r in rows {
        per_user
            .entry(r.user_id.as_str())
            .or_insert_with(|| (r.condition, BTreeMap::new()))
            .1
            .entry(r.prompt_index)
            .or_default()
            .push(r.overall_rating as f64);
    }
    let mut out = ImprovementDeltas::default();
    for (user, (condition, prompts)) in per_user {
        match (prompts.get(&1), prompts.get(&prompt_count)) {
            (Some(first), Some(last)) => {
                let (initial, final_rating) = (mean(first), mean(last));
                out.users.push(UserDelta {
                    user_id: user.to_string(),
                    condition,
                    initial,
                    final_rating,
                    delta: final_rating - initial,
                });
            }
            _ => out.warnings.push(format!(
                "user {user} lacks ratings for prompt 1 or {prompt_count}; omitted"
            )),
        }
    }
    let conditions: BTreeSet<Condition> = out.users.iter().map(|u| u.condition).collect();
    for c in conditions {
        out.summary.insert(c, DeltaSummary::from_deltas(&out.deltas(c)));
    }
    out
}
