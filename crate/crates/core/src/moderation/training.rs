use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    extract_features, train_helpfulness, train_sentiment, Category, Comment, HelpfulnessModel, Moderator,
    Sentiment, SentimentModel, SentimentReport,
};
use crate::media::{BehaviorSeries, Signal};
use crate::{Error, Result};

const CSV_HEADER: [&str; 7] = ["comment_id", "video_id", "text", "category", "timestamp", "score", "sentiment"];

/// One row of the moderation training CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRow {
    pub comment_id: String,
    pub video_id: String,
    pub text: String,
    pub category: Category,
    pub timestamp: Option<f64>,
    /// Summed crowd helpfulness rating.
    pub score: Option<f64>,
    pub sentiment: Option<Sentiment>,
}

pub fn read_training_csv<R: std::io::Read>(reader: R) -> Result<Vec<TrainingRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header: Vec<String> = csv.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != CSV_HEADER {
        return Err(Error::Format(format!(
            "training CSV header must be {}, got {}",
            CSV_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in csv.deserialize::<TrainingRow>().enumerate() {
        let row = record.map_err(|e| Error::Format(format!("training CSV row {}: {e}", i + 2)))?;
        if row.text.trim().is_empty() {
            return Err(Error::Format(format!("training CSV row {}: empty comment text", i + 2)));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_training_csv<W: std::io::Write>(writer: W, rows: &[TrainingRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub examples: usize,
    pub r_squared: Option<f64>,
    pub ridge_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModerationMetrics {
    pub schema_version: u32,
    pub seed: u64,
    pub helpfulness: BTreeMap<Category, CategoryMetrics>,
    /// Categories that could not be trained, with the reason.
    pub skipped: BTreeMap<Category, String>,
    pub sentiment: Option<SentimentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment_error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ModerationArtifacts {
    pub helpfulness: BTreeMap<Category, HelpfulnessModel>,
    pub sentiment: Option<SentimentModel>,
    pub metrics: ModerationMetrics,
}

impl ModerationArtifacts {
    pub fn helpfulness_file(category: Category) -> String {
        format!("helpfulness-{category}.json")
    }

    pub const SENTIMENT_FILE: &'static str = "sentiment.json";
    pub const METRICS_FILE: &'static str = "metrics.json";

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (category, model) in &self.helpfulness {
            write_json(&dir.join(Self::helpfulness_file(*category)), model)?;
        }
        if let Some(model) = &self.sentiment {
            write_json(&dir.join(Self::SENTIMENT_FILE), model)?;
        }
        write_json(&dir.join(Self::METRICS_FILE), &self.metrics)
    }

    pub fn into_moderator(self) -> Option<Moderator> {
        Some(Moderator {
            helpfulness: self.helpfulness,
            sentiment: self.sentiment?,
        })
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

impl Moderator {
    /// Loads artifacts written by [`ModerationArtifacts::write`].
    pub fn load(dir: &Path) -> Result<Self> {
        let sentiment: SentimentModel = read_json(&dir.join(ModerationArtifacts::SENTIMENT_FILE))?;
        if sentiment.schema_version != SentimentModel::SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: SentimentModel::SCHEMA_VERSION,
                found: sentiment.schema_version,
            });
        }
        let mut helpfulness = BTreeMap::new();
        for category in Category::ALL {
            let path = dir.join(ModerationArtifacts::helpfulness_file(category));
            if path.exists() {
                let model: HelpfulnessModel = read_json(&path)?;
                if model.schema_version != HelpfulnessModel::SCHEMA_VERSION {
                    return Err(Error::SchemaVersion {
                        expected: HelpfulnessModel::SCHEMA_VERSION,
                        found: model.schema_version,
                    });
                }
                helpfulness.insert(category, model);
            }
        }
        Ok(Self { helpfulness, sentiment })
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Trains one helpfulness model per category plus the sentiment classifier.
///
/// `series_for` supplies the behavior series of a training video, when
/// available; comments on videos without series get missing multimodal
/// features. Categories without enough labeled rows are reported in
/// `metrics.skipped` rather than failing the whole run.
pub fn train_moderation(
    rows: &[TrainingRow],
    series_for: &dyn Fn(&str) -> Option<BTreeMap<Signal, BehaviorSeries>>,
    seed: u64,
) -> Result<ModerationArtifacts> {
    let mut series_cache: BTreeMap<&str, BTreeMap<Signal, BehaviorSeries>> = BTreeMap::new();
    let mut labeled: BTreeMap<Category, Vec<_>> = BTreeMap::new();
    for row in rows {
        let Some(score) = row.score else { continue };
        let series = series_cache
            .entry(row.video_id.as_str())
            .or_insert_with(|| series_for(&row.video_id).unwrap_or_default());
        let comment = Comment {
            id: row.comment_id.clone(),
            video_id: row.video_id.clone(),
            author_id: None,
            text: row.text.clone(),
            category: row.category,
            video_timestamp: row.timestamp,
            created_at: 0,
        };
        labeled
            .entry(row.category)
            .or_default()
            .push((extract_features(&comment, series), score));
    }

    let mut helpfulness = BTreeMap::new();
    let mut per_category = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    for category in Category::ALL {
        let examples = labeled.remove(&category).unwrap_or_default();
        match train_helpfulness(&examples, category) {
            Ok(model) => {
                per_category.insert(
                    category,
                    CategoryMetrics {
                        examples: model.training.examples,
                        r_squared: model.training.r_squared,
                        ridge_fallback: model.training.ridge_fallback,
                    },
                );
                helpfulness.insert(category, model);
            }
            Err(e) => {
                skipped.insert(category, e.to_string());
            }
        }
    }

    let corpus: Vec<(String, Sentiment)> = rows
        .iter()
        .filter_map(|r| r.sentiment.map(|s| (r.text.clone(), s)))
        .collect();
    let (sentiment, report, sentiment_error) = match train_sentiment(&corpus, seed) {
        Ok((model, report)) => (Some(model), Some(report), None),
        Err(e) => (None, None, Some(e.to_string())),
    };

    Ok(ModerationArtifacts {
        helpfulness,
        sentiment,
        metrics: ModerationMetrics {
            schema_version: 1,
            seed,
            helpfulness: per_category,
            skipped,
            sentiment: report,
            sentiment_error,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_optional_columns() {
        let csv = "comment_id,video_id,text,category,timestamp,score,sentiment\n\
                   c1,v1,\"Nice eye contact, keep it up\",friendliness,12.5,33,positive\n\
                   c2,v1,Too fast,speech,,,negative\n\
                   c3,v2,Good speech.,speech,,12,\n";
        let rows = read_training_csv(csv.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].timestamp, Some(12.5));
        assert_eq!(rows[1].score, None);
        assert_eq!(rows[1].sentiment, Some(Sentiment::Negative));
        assert_eq!(rows[2].sentiment, None);
    }

    #[test]
    fn wrong_header_rejected() {
        let csv = "id,text\n1,hello\n";
        assert!(matches!(read_training_csv(csv.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn insufficient_category_is_skipped() {
        let rows: Vec<TrainingRow> = (0..50)
            .map(|i| TrainingRow {
                comment_id: format!("c{i}"),
                video_id: "v".into(),
                text: if i % 2 == 0 { format!("great pacing {i}") } else { format!("too quiet {i}") },
                category: Category::Speech,
                timestamp: None,
                score: Some(10.0 + (i % 30) as f64),
                sentiment: Some(if i % 2 == 0 { Sentiment::Positive } else { Sentiment::Negative }),
            })
            .collect();
        let a = train_moderation(&rows, &|_| None, 3).unwrap();
        assert!(a.helpfulness.contains_key(&Category::Speech));
        assert!(a.metrics.skipped.contains_key(&Category::Movement));
        assert!(a.sentiment.is_some());

        let dir = tempfile::tempdir().unwrap();
        a.write(dir.path()).unwrap();
        let m = Moderator::load(dir.path()).unwrap();
        assert_eq!(m.helpfulness.len(), 1);
        assert_eq!(Some(&m.sentiment), a.sentiment.as_ref());
    }
}
