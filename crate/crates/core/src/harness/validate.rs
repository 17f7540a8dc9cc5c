//! `validate`: one sequential session for the configured policy.

use serde::{Deserialize, Serialize};

use super::schema::{self, APPROVAL_TRACE_HEADER};
use super::{run_session, write_csv, write_json, write_jsonl, ExperimentSpec, HarnessError};
use crate::env::{run_rollout_traced, sample_operating_condition, TRAJECTORY_HEADER};
use crate::rng::rollout_seed;
use crate::sequential::{validation_saving, Decision, SessionStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateSummary {
    pub policy: String,
    pub base_seed: u64,
    pub final_decision: Decision,
    pub status: SessionStatus,
    pub stopping_time: u32,
    pub successes: u32,
    pub failures: u32,
    pub p_hat: f64,
    pub q: f64,
    pub false_approval_risk: f64,
    pub alpha: f64,
    pub beta: f64,
    pub validation_saving: f64,
}

#[derive(Serialize)]
struct TraceRow {
    n: u32,
    successes: u32,
    failures: u32,
    p_hat: f64,
    q: f64,
    decision: Decision,
}

pub fn cmd_validate(spec: &ExperimentSpec) -> Result<ValidateSummary, HarnessError> {
    let cfg = &spec.config;
    let run = spec.in_pool(|| {
        run_session(
            &cfg.policy,
            &cfg.environment,
            &cfg.thresholds,
            cfg.validation(),
            spec.base_seed,
            spec.parallelism,
        )
    })?;
    let session = &run.session;
    let history = session.history();
    let last = history
        .last()
        .ok_or_else(|| HarnessError::Config("session ended without rollouts".into()))?;
    let stop = session.stopping_time()?.rollouts();

    write_jsonl(&spec.path(schema::SESSION_LOG), history)?;
    let trace: Vec<TraceRow> = history
        .iter()
        .map(|e| TraceRow {
            n: e.n,
            successes: e.successes,
            failures: e.failures,
            p_hat: e.successes as f64 / e.n as f64,
            q: e.q,
            decision: e.decision,
        })
        .collect();
    write_csv(&spec.path(schema::APPROVAL_TRACE), &APPROVAL_TRACE_HEADER, &trace)?;

    let summary = ValidateSummary {
        policy: cfg.policy.label(),
        base_seed: spec.base_seed,
        final_decision: last.decision,
        status: session.status(),
        stopping_time: stop,
        successes: session.successes(),
        failures: session.failures(),
        p_hat: last.successes as f64 / last.n as f64,
        q: last.q,
        false_approval_risk: 1.0 - last.q,
        alpha: last.alpha,
        beta: last.beta,
        validation_saving: validation_saving(&[stop], cfg.decision.n_max)?,
    };
    write_json(&spec.path(schema::SUMMARY), &summary)?;

    if cfg.environment.dump_trajectories {
        dump_trajectories(spec, run.rollouts.len() as u64)?;
    }
    Ok(summary)
}

fn dump_trajectories(spec: &ExperimentSpec, count: u64) -> Result<(), HarnessError> {
    let cfg = &spec.config;
    let dir = spec.path(schema::TRAJECTORY_DIR);
    std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    for i in 0..count {
        let condition = sample_operating_condition(&cfg.environment.conditions, rollout_seed(spec.base_seed, i))
            .map_err(crate::env::EstimateError::from)?;
        let (_, rows) = run_rollout_traced(&cfg.policy, &condition, &cfg.thresholds, &cfg.environment.limits)
            .map_err(crate::env::EstimateError::from)?;
        write_csv(&dir.join(format!("rollout_{i:04}.csv")), &TRAJECTORY_HEADER, &rows)?;
    }
    Ok(())
}
