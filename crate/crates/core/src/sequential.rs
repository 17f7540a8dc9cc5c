//! Sequential approve / reject / continue validation.
//!
//! After each rollout the posterior approval probability `q_n` is compared
//! with the approval and rejection thresholds. Decisions are suppressed until
//! `n_min` rollouts have been seen, and a session still undecided at `n_max`
//! ends as `Exhausted` with a final `Continue`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta::{approval_probability, posterior_update, BetaError, BetaParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("invalid validation config: {0}")]
    Config(String),
    #[error("session already terminated with status {0}")]
    Terminated(SessionStatus),
    #[error("session is still running; no stopping time yet")]
    StillRunning,
    #[error("outcome must be 0 or 1, got {0}")]
    InvalidOutcome(u8),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] BetaError),
}

/// Decision thresholds and evidence budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    /// Required reliability.
    pub p0: f64,
    pub tau_a: f64,
    pub tau_r: f64,
    pub prior: BetaParams,
    pub n_min: u32,
    pub n_max: u32,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            p0: 0.95,
            tau_a: 0.95,
            tau_r: 0.05,
            prior: BetaParams::uniform(),
            n_min: 30,
            n_max: 100,
        }
    }
}

impl ValidationConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return Err(ValidationError::Config(format!("p0 must lie in (0, 1), got {}", self.p0)));
        }
        if !(self.tau_r > 0.0 && self.tau_r < self.tau_a && self.tau_a < 1.0) {
            return Err(ValidationError::Config(format!(
                "thresholds must satisfy 0 < tau_r < tau_a < 1, got tau_r = {}, tau_a = {}",
                self.tau_r, self.tau_a
            )));
        }
        if !(1 <= self.n_min && self.n_min <= self.n_max) {
            return Err(ValidationError::Config(format!(
                "rollout counts must satisfy 1 <= n_min <= n_max, got n_min = {}, n_max = {}",
                self.n_min, self.n_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Approve,
    Reject,
    Continue,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Approve => "Approve",
            Decision::Reject => "Reject",
            Decision::Continue => "Continue",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Running,
    Approved,
    Rejected,
    Exhausted,
}

impl SessionStatus {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, SessionStatus::Running)
    }
}

impl fmt::Display for SessionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionStatus::Running => "running",
            SessionStatus::Approved => "approved",
            SessionStatus::Rejected => "rejected",
            SessionStatus::Exhausted => "exhausted",
        })
    }
}

/// One line of the session log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub n: u32,
    pub outcome: u8,
    #[serde(rename = "S")]
    pub successes: u32,
    #[serde(rename = "F")]
    pub failures: u32,
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub decision: Decision,
}

/// The decision rule at a single stage, before any safeguard.
pub fn decide(q: f64, config: &ValidationConfig) -> Decision {
    if q >= config.tau_a {
        Decision::Approve
    } else if q <= config.tau_r {
        Decision::Reject
    } else {
        Decision::Continue
    }
}

/// Single-writer state machine over a rollout outcome stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSession {
    config: ValidationConfig,
    successes: u32,
    failures: u32,
    posterior: BetaParams,
    history: Vec<HistoryEntry>,
    status: SessionStatus,
}

impl ValidationSession {
    pub fn new(config: ValidationConfig) -> Result<Self, ValidationError> {
        config.validate()?;
        Ok(Self {
            config,
            successes: 0,
            failures: 0,
            posterior: config.prior,
            history: Vec::with_capacity(config.n_max as usize),
            status: SessionStatus::Running,
        })
    }

    pub fn config(&self) -> &ValidationConfig {
        &self.config
    }

    pub fn successes(&self) -> u32 {
        self.successes
    }

    pub fn failures(&self) -> u32 {
        self.failures
    }

    pub fn n(&self) -> u32 {
        self.successes + self.failures
    }

    pub fn posterior(&self) -> BetaParams {
        self.posterior
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    /// Empirical success rate `S_n / n`, `None` before the first rollout.
    pub fn empirical_rate(&self) -> Option<f64> {
        (self.n() > 0).then(|| self.successes as f64 / self.n() as f64)
    }

    /// Approval probability after the latest rollout (the prior's before any).
    pub fn approval_probability(&self) -> Result<f64, ValidationError> {
        match self.history.last() {
            Some(e) => Ok(e.q),
            None => Ok(approval_probability(&self.posterior, self.config.p0)?),
        }
    }

    /// Decision recorded at the latest rollout.
    pub fn last_decision(&self) -> Option<Decision> {
        self.history.last().map(|e| e.decision)
    }

    /// Adds one outcome (1 = safe) and applies the decision rule.
    pub fn ingest(&mut self, outcome: u8) -> Result<Decision, ValidationError> {
        if self.status.is_terminal() {
            return Err(ValidationError::Terminated(self.status));
        }
        let safe = match outcome {
            0 => false,
            1 => true,
            other => return Err(ValidationError::InvalidOutcome(other)),
        };
        let (s, f) = if safe {
            (self.successes + 1, self.failures)
        } else {
            (self.successes, self.failures + 1)
        };
        let posterior = posterior_update(self.config.prior, s.into(), f.into());
        let q = approval_probability(&posterior, self.config.p0)?;
        let n = s + f;

        let decision = if n < self.config.n_min {
            Decision::Continue
        } else {
            decide(q, &self.config)
        };

        self.successes = s;
        self.failures = f;
        self.posterior = posterior;
        self.history.push(HistoryEntry {
            n,
            outcome,
            successes: s,
            failures: f,
            alpha: posterior.alpha(),
            beta: posterior.beta(),
            q,
            decision,
        });
        self.status = match decision {
            Decision::Approve => SessionStatus::Approved,
            Decision::Reject => SessionStatus::Rejected,
            Decision::Continue if n >= self.config.n_max => SessionStatus::Exhausted,
            Decision::Continue => SessionStatus::Running,
        };
        Ok(decision)
    }

    /// Ingests outcomes until the session terminates or the stream ends.
    pub fn ingest_all<I: IntoIterator<Item = u8>>(&mut self, outcomes: I) -> Result<SessionStatus, ValidationError> {
        for y in outcomes {
            if self.status.is_terminal() {
                break;
            }
            self.ingest(y)?;
        }
        Ok(self.status)
    }

    pub fn stopping_time(&self) -> Result<StoppingTime, ValidationError> {
        stopping_time(self)
    }
}

/// Rollout count at which a session stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingTime {
    /// First `n` with an Approve or Reject decision.
    Decided(u32),
    /// No decision by the horizon; carries `n_max`.
    Horizon(u32),
}

impl StoppingTime {
    pub fn rollouts(&self) -> u32 {
        match *self {
            StoppingTime::Decided(n) | StoppingTime::Horizon(n) => n,
        }
    }
}

pub fn stopping_time(session: &ValidationSession) -> Result<StoppingTime, ValidationError> {
    match session.status {
        SessionStatus::Running => Err(ValidationError::StillRunning),
        SessionStatus::Exhausted => Ok(StoppingTime::Horizon(session.config.n_max)),
        SessionStatus::Approved | SessionStatus::Rejected => Ok(StoppingTime::Decided(session.n())),
    }
}

/// `1 - mean(N) / n_max`.
pub fn validation_saving(stopping_times: &[u32], n_max: u32) -> Result<f64, ValidationError> {
    if stopping_times.is_empty() {
        return Err(ValidationError::Usage("no stopping times given".into()));
    }
    if n_max == 0 {
        return Err(ValidationError::Usage("n_max must be positive".into()));
    }
    if let Some(&bad) = stopping_times.iter().find(|&&n| n > n_max) {
        return Err(ValidationError::Usage(format!("stopping time {bad} exceeds n_max = {n_max}")));
    }
    let mean = stopping_times.iter().map(|&n| n as f64).sum::<f64>() / stopping_times.len() as f64;
    Ok(1.0 - mean / n_max as f64)
}

/// Plug-in baseline: approve iff `S / n >= p0`.
pub fn empirical_rule(successes: u64, n: u64, p0: f64) -> Result<Decision, ValidationError> {
    if n == 0 {
        return Err(ValidationError::Usage("empirical rule needs at least one rollout".into()));
    }
    if successes > n {
        return Err(ValidationError::Usage(format!("successes {successes} exceed n = {n}")));
    }
    Ok(if successes as f64 / n as f64 >= p0 {
        Decision::Approve
    } else {
        Decision::Reject
    })
}

/// Smallest `S` in `0..=n` whose posterior meets `tau_a`, if any.
pub fn minimal_approving_successes(n: u32, config: &ValidationConfig) -> Result<Option<u32>, ValidationError> {
    for s in 0..=n {
        let post = posterior_update(config.prior, s.into(), (n - s).into());
        if approval_probability(&post, config.p0)? >= config.tau_a {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
