//! Experiment orchestration: config loading, seeded sessions and artifacts.
//!
//! Every command is a pure function of `(config, base_seed)`. Rollouts fan
//! out over a bounded worker pool and are merged in rollout-index order, so
//! `--parallel` never changes an artifact.

mod boundary;
mod calibrate;
mod config;
mod report;
pub mod schema;
mod session;
mod sweep;
mod validate;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use boundary::{boundary_rows, cmd_boundary, BoundaryMinimum, BoundaryRow};
pub use calibrate::{calibrate_true_p, cmd_calibrate, CalibrationRow};
pub use config::{
    BoundarySection, CalibrateSection, DecisionSection, EnvironmentSection, ExperimentSection, HarnessConfig,
    SweepSection,
};
pub use report::cmd_report;
pub use session::{ingest_outcomes, run_session, SessionRun};
pub use sweep::{cmd_sweep, SweepRow};
pub use validate::{cmd_validate, ValidateSummary};

use crate::beta::BetaError;
use crate::controllers::PolicyError;
use crate::env::EstimateError;
use crate::sequential::ValidationError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing input files in {}: {}", dir.display(), missing.join(", "))]
    MissingInputs { dir: PathBuf, missing: Vec<String> },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Numerical(#[from] BetaError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

impl HarnessError {
    /// 2 for bad configuration or inputs, 3 for anything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::MissingInputs { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn json(path: &Path, source: serde_json::Error) -> Self {
        HarnessError::Json {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Validate,
    Boundary,
    Calibrate,
    Sweep,
    Report,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Validate => "validate",
            Command::Boundary => "boundary",
            Command::Calibrate => "calibrate",
            Command::Sweep => "sweep",
            Command::Report => "report",
        })
    }
}

/// One command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config: HarnessConfig,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub parallelism: usize,
}

impl ExperimentSpec {
    pub fn new(command: Command, config: HarnessConfig, base_seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config,
            base_seed,
            output_dir: output_dir.into(),
            parallelism: 1,
        }
    }

    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism;
        self
    }

    fn prepare(&self) -> Result<(), HarnessError> {
        if self.parallelism == 0 {
            return Err(HarnessError::Config("parallelism must be at least 1".into()));
        }
        self.config.validate()?;
        std::fs::create_dir_all(&self.output_dir).map_err(|e| HarnessError::io(&self.output_dir, e))
    }

    pub(crate) fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    /// Runs `f` on a pool of `parallelism` workers.
    pub(crate) fn in_pool<T: Send>(
        &self,
        f: impl FnOnce() -> Result<T, HarnessError> + Send,
    ) -> Result<T, HarnessError> {
        if self.parallelism <= 1 {
            return f();
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallelism)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?
            .install(f)
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<(), HarnessError> {
    spec.prepare()?;
    match spec.command {
        Command::Validate => cmd_validate(spec).map(|_| ()),
        Command::Boundary => cmd_boundary(spec).map(|_| ()),
        Command::Calibrate => cmd_calibrate(spec).map(|_| ()),
        Command::Sweep => cmd_sweep(spec).map(|_| ()),
        Command::Report => cmd_report(spec).map(|_| ()),
    }
}

pub(crate) fn write_csv<R: serde::Serialize>(path: &Path, header: &[&str], rows: &[R]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| HarnessError::csv(path, e))?;
    w.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::json(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_jsonl<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut text = String::new();
    for r in rows {
        text.push_str(&serde_json::to_string(r).map_err(|e| HarnessError::json(path, e))?);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
