//! A validation session driven by seeded rollouts.

use super::{EnvironmentSection, HarnessError};
use crate::controllers::Policy;
use crate::env::{run_batch, RolloutOutcome};
use crate::safety::SafetyThresholds;
use crate::sequential::{ValidationConfig, ValidationSession};

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRun {
    pub session: ValidationSession,
    /// The rollouts the session consumed, in index order.
    pub rollouts: Vec<RolloutOutcome>,
}

/// Feeds `outcomes` in order until the session terminates.
pub fn ingest_outcomes(config: ValidationConfig, outcomes: &[RolloutOutcome]) -> Result<ValidationSession, HarnessError> {
    let mut session = ValidationSession::new(config)?;
    session.ingest_all(outcomes.iter().map(|o| o.outcome))?;
    Ok(session)
}

/// Runs one session to termination; rollout `i` uses `rollout_seed(base_seed, i)`.
///
/// Rollouts are generated in chunks so a session that stops early does not
/// pay for the whole horizon.
pub fn run_session(
    policy: &dyn Policy,
    environment: &EnvironmentSection,
    thresholds: &SafetyThresholds,
    config: ValidationConfig,
    base_seed: u64,
    parallelism: usize,
) -> Result<SessionRun, HarnessError> {
    let mut session = ValidationSession::new(config)?;
    let mut rollouts = Vec::new();
    let chunk = (parallelism.max(1) * 8) as u64;
    let n_max = u64::from(config.n_max);
    let mut start = 0;
    while !session.status().is_terminal() && start < n_max {
        let count = chunk.min(n_max - start);
        let batch = run_batch(
            policy,
            &environment.conditions,
            thresholds,
            &environment.limits,
            base_seed,
            start,
            count,
            parallelism,
        )?;
        for o in batch {
            if session.status().is_terminal() {
                break;
            }
            session.ingest(o.outcome)?;
            rollouts.push(o);
        }
        start += count;
    }
    Ok(SessionRun { session, rollouts })
}
