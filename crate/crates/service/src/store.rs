//! On-disk layout: an append-only event log, the workflow config, uploaded
//! media and per-video analysis records.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use podium::bundle::AutomatedFeedback;
use podium::workflow::{EventRecord, WorkflowConfig, TWO_DAYS};
use podium::{Error, Result};
use serde::{Deserialize, Serialize};

pub const ANALYSIS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn events(&self) -> PathBuf {
        self.root.join("events.jsonl")
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.toml")
    }

    pub fn models(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn media_root(&self) -> PathBuf {
        self.root.join("media")
    }

    pub fn media(&self, video_id: &str) -> PathBuf {
        self.media_root().join(video_id)
    }

    pub fn staging(&self, name: &str) -> PathBuf {
        self.media_root().join(format!(".staging-{name}"))
    }

    pub fn analysis(&self, video_id: &str) -> PathBuf {
        self.media(video_id).join("analysis.json")
    }

    /// Reads `config.toml`, writing a default schedule starting at `now` the
    /// first time so that later replays see the same configuration.
    pub fn load_or_init_config(&self, now: i64) -> Result<WorkflowConfig> {
        let path = self.config();
        if path.exists() {
            return WorkflowConfig::load(&path);
        }
        fs::create_dir_all(&self.root)?;
        let config = WorkflowConfig::with_schedule(now, TWO_DAYS);
        let text = toml::to_string(&config).map_err(|e| Error::Format(format!("config: {e}")))?;
        fs::write(&path, text)?;
        tracing::info!(path = %path.display(), "wrote default workflow config");
        Ok(config)
    }
}

/// What the analysis worker leaves next to the media.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub schema_version: u32,
    pub video_id: String,
    pub duration: f64,
    pub automated: AutomatedFeedback,
}

impl AnalysisRecord {
    pub fn load(path: &Path) -> Result<Self> {
        let record: AnalysisRecord = serde_json::from_slice(&fs::read(path)?)?;
        if record.schema_version != ANALYSIS_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: ANALYSIS_SCHEMA_VERSION,
                found: record.schema_version,
            });
        }
        Ok(record)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(self)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

/// Append-only JSON-lines event log.
#[derive(Debug)]
pub struct EventLog {
    file: File,
}

impl EventLog {
    /// Opens (or creates) the log and returns the records it holds. A
    /// partially written final line, left by a crash mid-append, is dropped
    /// and truncated away; corruption anywhere else is an error.
    pub fn open(path: &Path) -> Result<(Self, Vec<EventRecord>)> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;
        let mut records = Vec::new();
        let mut good_len = 0u64;
        let mut reader = BufReader::new(&file);
        let mut line = Vec::new();
        let mut line_no = 0;
        loop {
            line.clear();
            let n = reader.read_until(b'\n', &mut line)?;
            if n == 0 {
                break;
            }
            line_no += 1;
            if line.last() != Some(&b'\n') {
                tracing::warn!(line = line_no, "dropping torn final event");
                break;
            }
            let record = serde_json::from_slice::<EventRecord>(&line)
                .map_err(|e| Error::Format(format!("{}: line {line_no}: {e}", path.display())))?;
            records.push(record);
            good_len += n as u64;
        }
        drop(reader);
        if file.metadata()?.len() != good_len {
            file.set_len(good_len)?;
            file.seek(SeekFrom::End(0))?;
        }
        Ok((Self { file }, records))
    }

    pub fn append(&mut self, records: &[EventRecord]) -> io::Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let mut buf = Vec::new();
        for r in records {
            serde_json::to_writer(&mut buf, r)?;
            buf.push(b'\n');
        }
        self.file.write_all(&buf)?;
        self.file.sync_data()
    }
}
