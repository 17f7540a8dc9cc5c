//! `calibrate`: decision frequencies of synthetic policies with known capability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schema::{self, CALIBRATION_HEADER};
use super::{run_session, write_csv, EnvironmentSection, ExperimentSpec, HarnessError};
use crate::controllers::PolicySpec;
use crate::rng::child_seed;
use crate::safety::SafetyThresholds;
use crate::sequential::{validation_saving, SessionStatus, ValidationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub true_p: f64,
    pub sessions: u32,
    pub approve_freq: f64,
    pub reject_freq: f64,
    pub exhaust_freq: f64,
    pub mean_stopping_time: f64,
    pub validation_saving: f64,
    /// Approvals of a policy whose true capability is below `p0`.
    pub false_approval_freq: f64,
}

/// Runs `sessions` independent sessions of a synthetic policy with capability `true_p`.
///
/// Session `s` draws its rollouts from `child_seed(base_seed, s)`; sessions run
/// on the current worker pool.
pub fn calibrate_true_p(
    config: ValidationConfig,
    environment: &EnvironmentSection,
    thresholds: &SafetyThresholds,
    true_p: f64,
    sessions: u32,
    base_seed: u64,
) -> Result<CalibrationRow, HarnessError> {
    if sessions == 0 {
        return Err(HarnessError::Config("at least one session is required".into()));
    }
    let policy = PolicySpec::synthetic(true_p);
    policy.validate()?;
    let results: Vec<(SessionStatus, u32)> = (0..sessions)
        .into_par_iter()
        .map(|s| {
            let run = run_session(&policy, environment, thresholds, config, child_seed(base_seed, s.into()), 1)?;
            Ok((run.session.status(), run.session.stopping_time()?.rollouts()))
        })
        .collect::<Result<_, HarnessError>>()?;

    let count = |want: SessionStatus| results.iter().filter(|(s, _)| *s == want).count() as f64 / sessions as f64;
    let stops: Vec<u32> = results.iter().map(|(_, n)| *n).collect();
    let approve_freq = count(SessionStatus::Approved);
    Ok(CalibrationRow {
        true_p,
        sessions,
        approve_freq,
        reject_freq: count(SessionStatus::Rejected),
        exhaust_freq: count(SessionStatus::Exhausted),
        mean_stopping_time: stops.iter().map(|&n| n as f64).sum::<f64>() / sessions as f64,
        validation_saving: validation_saving(&stops, config.n_max)?,
        false_approval_freq: if true_p < config.p0 { approve_freq } else { 0.0 },
    })
}

pub fn cmd_calibrate(spec: &ExperimentSpec) -> Result<Vec<CalibrationRow>, HarnessError> {
    let cfg = &spec.config;
    let section = &cfg.experiment.calibrate;
    let rows = spec.in_pool(|| {
        section
            .true_p
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                calibrate_true_p(
                    cfg.validation(),
                    &cfg.environment,
                    &cfg.thresholds,
                    p,
                    section.sessions,
                    child_seed(spec.base_seed, j as u64),
                )
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    write_csv(&spec.path(schema::CALIBRATION), &CALIBRATION_HEADER, &rows)?;
    Ok(rows)
}
