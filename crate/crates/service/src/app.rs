//! Shared service state: the workflow behind a lock, its durable log, and
//! the analysis worker pool.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use podium::bundle::FeedbackBundle;
use podium::moderation::Moderator;
use podium::pipeline::{analyze_media, assemble_bundle, load_media, AnalysisConfig, BundleInputs};
use podium::workflow::{Condition, Workflow, WorkflowConfig};
use podium::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use tokio::sync::Semaphore;
use tokio::task::JoinHandle;

use crate::store::{AnalysisRecord, DataDir, EventLog, ANALYSIS_SCHEMA_VERSION};

pub type Clock = Arc<dyn Fn() -> i64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0)
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VideoStatus {
    Processing,
    Ready,
    Failed,
}

pub struct ServiceOptions {
    pub workers: usize,
    pub clock: Clock,
    /// Moderation models; treatment feedback is unavailable without them.
    pub moderator: Option<Moderator>,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        Self {
            workers: 2,
            clock: system_clock(),
            moderator: None,
        }
    }
}

struct State {
    workflow: Workflow,
    log: EventLog,
}

pub struct Service {
    data: DataDir,
    state: RwLock<State>,
    clock: Clock,
    moderator: Option<Moderator>,
    analysis: AnalysisConfig,
    pool: Arc<Semaphore>,
    jobs: Mutex<Vec<JoinHandle<()>>>,
    failures: Mutex<HashMap<String, String>>,
}

impl Service {
    /// Replays the event log in `data` into a fresh workflow.
    pub fn open(data: DataDir, options: ServiceOptions) -> Result<Arc<Self>> {
        let config = data.load_or_init_config((options.clock)())?;
        let (log, records) = EventLog::open(&data.events())?;
        let workflow = Workflow::replay(config.clone(), records)?;
        let analysis = AnalysisConfig {
            max_audio_secs: config.max_audio_secs,
            max_frame_rate: config.max_frame_rate,
            ..AnalysisConfig::default()
        };
        Ok(Arc::new(Self {
            data,
            state: RwLock::new(State { workflow, log }),
            clock: options.clock,
            moderator: options.moderator,
            analysis,
            pool: Arc::new(Semaphore::new(options.workers.max(1))),
            jobs: Mutex::new(Vec::new()),
            failures: Mutex::new(HashMap::new()),
        }))
    }

    pub fn data(&self) -> &DataDir {
        &self.data
    }

    pub fn analysis_config(&self) -> &AnalysisConfig {
        &self.analysis
    }

    pub fn now(&self) -> i64 {
        (self.clock)()
    }

    pub fn config(&self) -> WorkflowConfig {
        self.read(|wf| wf.config().clone())
    }

    pub fn read<T>(&self, f: impl FnOnce(&Workflow) -> T) -> T {
        let state = self.state.read().unwrap_or_else(|e| e.into_inner());
        f(&state.workflow)
    }

    /// Runs a command against the workflow and makes whatever events it
    /// produced durable before returning. If the command fails after
    /// appending, or the append itself fails, in-memory state is rebuilt
    /// from the log so that it never runs ahead of disk.
    pub fn mutate<T>(&self, f: impl FnOnce(&mut Workflow, i64) -> Result<T>) -> Result<T> {
        let now = self.now();
        let mut state = self.state.write().unwrap_or_else(|e| e.into_inner());
        let before = state.workflow.log().len();
        let out = f(&mut state.workflow, now);
        let grew = state.workflow.log().len() > before;
        let persisted = match &out {
            Ok(_) => {
                let State { workflow, log } = &mut *state;
                log.append(&workflow.log()[before..]).map_err(Error::from)
            }
            Err(_) if grew => Err(Error::Parameter("command failed part-way".into())),
            Err(_) => Ok(()),
        };
        if let Err(e) = persisted {
            tracing::error!(error = %e, "reloading workflow state from the event log");
            let config = state.workflow.config().clone();
            let (log, records) = EventLog::open(&self.data.events())?;
            *state = State {
                workflow: Workflow::replay(config, records)?,
                log,
            };
            return Err(out.err().unwrap_or(e));
        }
        out
    }

    pub fn user_for_token(&self, token: &str) -> Option<String> {
        let digest = sha256_hex(token.as_bytes());
        self.read(|wf| wf.user_for_token(&digest).map(str::to_string))
    }

    pub fn status(&self, video_id: &str) -> Result<VideoStatus> {
        let ready = self.read(|wf| wf.video(video_id).map(|v| v.ready))?;
        Ok(if ready {
            VideoStatus::Ready
        } else if self.failure(video_id).is_some() {
            VideoStatus::Failed
        } else {
            VideoStatus::Processing
        })
    }

    pub fn failure(&self, video_id: &str) -> Option<String> {
        self.failures.lock().unwrap_or_else(|e| e.into_inner()).get(video_id).cloned()
    }

    /// Queues analysis for every uploaded video that has not finished, e.g.
    /// after a restart.
    pub fn resume_pending(self: &Arc<Self>) {
        let pending: Vec<String> = self.read(|wf| wf.videos().filter(|v| !v.ready).map(|v| v.video_id.clone()).collect());
        for video_id in pending {
            self.schedule_analysis(video_id);
        }
    }

    pub fn schedule_analysis(self: &Arc<Self>, video_id: String) {
        let service = Arc::clone(self);
        let handle = tokio::spawn(async move {
            let Ok(_permit) = service.pool.clone().acquire_owned().await else {
                return;
            };
            let worker = Arc::clone(&service);
            let id = video_id.clone();
            let result = tokio::task::spawn_blocking(move || worker.analyze(&id))
                .await
                .unwrap_or_else(|e| Err(Error::Parameter(format!("analysis task failed: {e}"))));
            if let Err(e) = result {
                tracing::warn!(video_id = %video_id, error = %e, "analysis failed");
                service
                    .failures
                    .lock()
                    .unwrap_or_else(|e| e.into_inner())
                    .insert(video_id, e.to_string());
            }
        });
        self.jobs.lock().unwrap_or_else(|e| e.into_inner()).push(handle);
    }

    /// Waits until every queued analysis job has finished.
    pub async fn wait_for_jobs(&self) {
        loop {
            let jobs: Vec<_> = std::mem::take(&mut *self.jobs.lock().unwrap_or_else(|e| e.into_inner()));
            if jobs.is_empty() {
                return;
            }
            for job in jobs {
                let _ = job.await;
            }
        }
    }

    fn analyze(&self, video_id: &str) -> Result<()> {
        let dir = self.data.media(video_id);
        let media = load_media(&dir)?;
        let automated = analyze_media(&media, &self.analysis)?;
        AnalysisRecord {
            schema_version: ANALYSIS_SCHEMA_VERSION,
            video_id: video_id.to_string(),
            duration: media.audio.duration(),
            automated,
        }
        .write(&self.data.analysis(video_id))?;
        self.mutate(|wf, now| wf.mark_analyzed(video_id, now))?;
        tracing::info!(video_id, "analysis complete");
        Ok(())
    }

    /// The owner-facing bundle for a finished video.
    pub fn feedback_bundle(&self, video_id: &str) -> Result<FeedbackBundle> {
        let (owner, feedback) = self.read(|wf| -> Result<_> {
            let video = wf.video(video_id)?;
            Ok((video.owner.clone(), wf.peer_feedback(video_id)?))
        })?;
        let condition: Condition = self.read(|wf| wf.condition(&owner))?;
        let record = AnalysisRecord::load(&self.data.analysis(video_id))?;
        let media_ref = format!("/videos/{video_id}/media/audio.wav");
        assemble_bundle(
            BundleInputs {
                video_id,
                condition,
                media_ref: Some(&media_ref),
                duration: record.duration,
                feedback: &feedback,
                automated: Some(&record.automated),
                moderator: self.moderator.as_ref(),
            },
            &self.analysis,
        )
    }

    pub fn has_moderator(&self) -> bool {
        self.moderator.is_some()
    }

    /// Moves a validated staging directory into place for `video_id`.
    pub fn install_media(&self, staging: &std::path::Path, video_id: &str) -> Result<()> {
        let target = self.data.media(video_id);
        if target.exists() {
            // left behind by an upload whose event never reached the log
            fs::remove_dir_all(&target)?;
        }
        fs::rename(staging, target)?;
        Ok(())
    }

    pub fn media_digests(dir: &std::path::Path) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for name in [podium::pipeline::layout::AUDIO, podium::pipeline::layout::TRANSCRIPT, podium::pipeline::layout::SMILE] {
            let path = dir.join(name);
            if path.exists() {
                out.insert(name.to_string(), sha256_hex(&fs::read(path)?));
            }
        }
        Ok(out)
    }
}
