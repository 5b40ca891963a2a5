//! Command-line entry point. Exit codes: 0 success, 1 validation failure,
//! 2 internal error; failures are reported as JSON on stderr.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use podium::media::{BehaviorSeries, Signal};
use podium::moderation::{read_training_csv, train_moderation, Moderator};
use podium::pipeline::{analyze_submission_dir, AnalysisConfig};
use podium::stats::{build_report, read_ratings_csv, write_ratings_csv};
use podium::workflow::{Condition, Workflow};
use podium::{Error, Result};
use serde_json::json;

use crate::app::{sha256_hex, system_clock, Service, ServiceOptions};
use crate::store::{AnalysisRecord, DataDir, EventLog};

#[derive(Debug, Parser)]
#[command(name = "podium", version, about = "Peer video feedback platform for presentation practice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Concurrent analysis jobs.
        #[arg(long, default_value_t = 2)]
        workers: usize,
        /// Moderation models; defaults to DATA/models.
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Analyze a submission directory and write its feedback bundle.
    Analyze {
        dir: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train helpfulness and sentiment models from a labeled CSV.
    TrainModeration {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory of per-video analysis records (a service data dir's
        /// `media/`), used for the multimodal features.
        #[arg(long)]
        media: Option<PathBuf>,
    },
    /// Reliability, trajectory and effect-size report from ratings.
    Stats {
        /// Ratings CSV as written by `export-ratings`.
        #[arg(long, conflicts_with = "data", required_unless_present = "data")]
        ratings: Option<PathBuf>,
        /// Read ratings straight from a service data directory.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        prompts: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Release a prompt now, ahead of its schedule.
    ReleasePrompt {
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[arg(long)]
        index: u32,
    },
    /// Register a participant and print their bearer token.
    AddUser {
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long, value_enum)]
        condition: ConditionArg,
        /// Use this token instead of generating one.
        #[arg(long)]
        token: Option<String>,
    },
    /// Write the final-video ratings of a data directory as CSV.
    ExportRatings {
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConditionArg {
    Treatment,
    Control,
}

impl From<ConditionArg> for Condition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Treatment => Condition::Treatment,
            ConditionArg::Control => Condition::Control,
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            report("usage", &e.to_string());
            return 1;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) if e.is_validation() => {
            report("validation", &e.to_string());
            1
        }
        Err(e) => {
            report("internal", &e.to_string());
            2
        }
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message.trim() }));
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Serve {
            data,
            addr,
            workers,
            models,
        } => serve(DataDir::new(data), addr, workers, models),
        Command::Analyze { dir, out } => {
            let bundle = analyze_submission_dir(&dir, &AnalysisConfig::default())?;
            let text = bundle.to_canonical_json()?;
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::TrainModeration {
            input,
            out,
            seed,
            media,
        } => {
            let rows = read_training_csv(File::open(&input)?)?;
            let lookup = |video_id: &str| media.as_deref().and_then(|root| load_series(root, video_id));
            let artifacts = train_moderation(&rows, &lookup, seed)?;
            artifacts.write(&out)?;
            println!("{}", serde_json::to_string_pretty(&artifacts.metrics)?);
            Ok(())
        }
        Command::Stats {
            ratings,
            data,
            prompts,
            format,
        } => {
            let rows = match (ratings, data) {
                (Some(path), _) => read_ratings_csv(File::open(path)?)?,
                (None, Some(dir)) => load_workflow(&DataDir::new(dir))?.ratings_export(),
                (None, None) => return Err(Error::Parameter("either --ratings or --data is required".into())),
            };
            let report = build_report(&rows, prompts);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Text => print!("{}", report.render_text()),
            }
            Ok(())
        }
        Command::ReleasePrompt { data, index } => {
            let data = DataDir::new(data);
            append_command(&data, |wf, now| wf.release_prompt(index, now))?;
            println!("{}", json!({ "released": index }));
            Ok(())
        }
        Command::AddUser {
            data,
            user,
            condition,
            token,
        } => {
            let data = DataDir::new(data);
            let token = token.unwrap_or_else(|| format!("{:032x}", rand::random::<u128>()));
            let digest = sha256_hex(token.as_bytes());
            append_command(&data, |wf, now| wf.register_user(&user, condition.into(), Some(digest), now))?;
            println!("{}", json!({ "user_id": user, "token": token }));
            Ok(())
        }
        Command::ExportRatings { data, out } => {
            let rows = load_workflow(&DataDir::new(data))?.ratings_export();
            match out {
                Some(path) => write_ratings_csv(File::create(path)?, &rows)?,
                None => write_ratings_csv(std::io::stdout().lock(), &rows)?,
            }
            Ok(())
        }
    }
}

fn load_workflow(data: &DataDir) -> Result<Workflow> {
    let config = data.load_or_init_config(system_clock()())?;
    let (_, records) = EventLog::open(&data.events())?;
    Workflow::replay(config, records)
}

/// Applies one admin command to the data directory's log. Meant for use
/// while the server is stopped; a running server does not see the event
/// until it restarts.
fn append_command(data: &DataDir, f: impl FnOnce(&mut Workflow, i64) -> Result<()>) -> Result<()> {
    let now = system_clock()();
    let config = data.load_or_init_config(now)?;
    let (mut log, records) = EventLog::open(&data.events())?;
    let mut wf = Workflow::replay(config, records)?;
    let before = wf.log().len();
    f(&mut wf, now)?;
    log.append(&wf.log()[before..])?;
    Ok(())
}

fn load_series(media_root: &Path, video_id: &str) -> Option<BTreeMap<Signal, BehaviorSeries>> {
    let record = AnalysisRecord::load(&media_root.join(video_id).join("analysis.json")).ok()?;
    Some(record.automated.series.into_iter().map(|s| (s.signal, s)).collect())
}

fn serve(data: DataDir, addr: SocketAddr, workers: usize, models: Option<PathBuf>) -> Result<()> {
    let models = models.unwrap_or_else(|| data.models());
    let moderator = if models.exists() {
        Some(Moderator::load(&models)?)
    } else {
        tracing::warn!(path = %models.display(), "no moderation models; treatment feedback disabled");
        None
    };
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let service = Service::open(
            data,
            ServiceOptions {
                workers,
                moderator,
                ..ServiceOptions::default()
            },
        )?;
        service.resume_pending();
        let listener = tokio::net::TcpListener::bind(addr).await?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        axum::serve(listener, crate::api::router(service.clone()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        service.wait_for_jobs().await;
        Ok(())
    })
}
