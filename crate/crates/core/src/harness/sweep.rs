//! `sweep`: sequential sessions and capability estimates over a checkpoint ladder.

use serde::{Deserialize, Serialize};

use super::schema::{
    self, CAPABILITY_TABLE_HEADER, DECISION_TABLE_HEADER, REWARD_SCATTER_HEADER, STOPPING_TABLE_HEADER,
};
use super::{ingest_outcomes, write_csv, ExperimentSpec, HarnessError};
use crate::controllers::{checkpoint_ladder, PolicySpec};
use crate::env::{estimate_marginal_capabilities, run_batch, CapabilityEstimate, MarginalEstimate};
use crate::rng::child_seed;
use crate::safety::CONSTRAINT_COUNT;
use crate::sequential::{empirical_rule, Decision, SessionStatus};

/// Everything the sweep learned about one ladder member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub controller: String,
    pub quality: f64,
    pub rollouts: u32,
    pub successes: u32,
    pub p_hat: f64,
    pub empirical_decision: Decision,
    pub q_n: f64,
    pub bayesian_decision: Decision,
    pub status: SessionStatus,
    pub stopping_rollout: u32,
    pub capability: CapabilityEstimate,
    pub marginals: MarginalEstimate,
}

impl SweepRow {
    /// Empirical approval while the posterior rule has not approved.
    pub fn is_mismatch(&self) -> bool {
        self.empirical_decision == Decision::Approve && self.bayesian_decision != Decision::Approve
    }
}

#[derive(Serialize)]
struct DecisionLine<'a> {
    controller: &'a str,
    quality: f64,
    rollouts: u32,
    successes: u32,
    p_hat: f64,
    empirical_decision: Decision,
    q_n: f64,
    bayesian_decision: Decision,
    mismatch: bool,
}

#[derive(Serialize)]
struct StoppingLine<'a> {
    controller: &'a str,
    quality: f64,
    stopping_rollout: u32,
    final_decision: Decision,
    status: SessionStatus,
}

#[derive(Serialize)]
struct CapabilityLine<'a> {
    controller: &'a str,
    quality: f64,
    n: u64,
    successes: u64,
    p_hat: f64,
    std_error: f64,
    mean_reward: f64,
    marginals: [f64; CONSTRAINT_COUNT],
    independence_product: f64,
}

#[derive(Serialize)]
struct ScatterLine<'a> {
    controller: &'a str,
    quality: f64,
    rollout: u64,
    seed: u64,
    cumulative_reward: f64,
    outcome: u8,
}

pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>, HarnessError> {
    let cfg = &spec.config;
    let section = &cfg.experiment.sweep;
    let ladder = checkpoint_ladder(section.count, section.quality_low, section.quality_high)?;
    let validation = cfg.validation();
    let env = &cfg.environment;

    let mut rows = Vec::with_capacity(ladder.len());
    let mut scatter = Vec::new();
    for (k, base_member) in ladder.iter().enumerate() {
        let member = PolicySpec {
            gains: cfg.policy.gains,
            noise_seed_offset: cfg.policy.noise_seed_offset,
            ..*base_member
        };
        let label = member.label();
        let session_seed = child_seed(spec.base_seed, 2 * k as u64);
        let oracle_seed = child_seed(spec.base_seed, 2 * k as u64 + 1);

        // The full horizon is simulated for the reward scatter even when the
        // session stops early.
        let (outcomes, marginals) = spec.in_pool(|| {
            let outcomes = run_batch(
                &member,
                &env.conditions,
                &cfg.thresholds,
                &env.limits,
                session_seed,
                0,
                validation.n_max.into(),
                spec.parallelism,
            )?;
            let marginals = estimate_marginal_capabilities(
                &member,
                &env.conditions,
                &cfg.thresholds,
                &env.limits,
                section.oracle_n,
                oracle_seed,
            )?;
            Ok((outcomes, marginals))
        })?;
        let session = ingest_outcomes(validation, &outcomes)?;
        let last = *session
            .history()
            .last()
            .ok_or_else(|| HarnessError::Config("session ended without rollouts".into()))?;

        for (i, o) in outcomes.iter().enumerate() {
            scatter.push((label.clone(), member.quality, i as u64, o.seed, o.cumulative_reward, o.outcome));
        }
        rows.push(SweepRow {
            controller: label,
            quality: member.quality,
            rollouts: last.n,
            successes: last.successes,
            p_hat: last.successes as f64 / last.n as f64,
            empirical_decision: empirical_rule(last.successes.into(), last.n.into(), validation.p0)?,
            q_n: last.q,
            bayesian_decision: last.decision,
            status: session.status(),
            stopping_rollout: session.stopping_time()?.rollouts(),
            capability: marginals.capability(),
            marginals,
        });
    }

    let decisions: Vec<DecisionLine> = rows
        .iter()
        .map(|r| DecisionLine {
            controller: &r.controller,
            quality: r.quality,
            rollouts: r.rollouts,
            successes: r.successes,
            p_hat: r.p_hat,
            empirical_decision: r.empirical_decision,
            q_n: r.q_n,
            bayesian_decision: r.bayesian_decision,
            mismatch: r.is_mismatch(),
        })
        .collect();
    write_csv(&spec.path(schema::DECISION_TABLE), &DECISION_TABLE_HEADER, &decisions)?;

    let stopping: Vec<StoppingLine> = rows
        .iter()
        .map(|r| StoppingLine {
            controller: &r.controller,
            quality: r.quality,
            stopping_rollout: r.stopping_rollout,
            final_decision: r.bayesian_decision,
            status: r.status,
        })
        .collect();
    write_csv(&spec.path(schema::STOPPING_TABLE), &STOPPING_TABLE_HEADER, &stopping)?;

    let capability: Vec<CapabilityLine> = rows
        .iter()
        .map(|r| CapabilityLine {
            controller: &r.controller,
            quality: r.quality,
            n: r.capability.n,
            successes: r.capability.successes,
            p_hat: r.capability.p_hat,
            std_error: r.capability.std_error,
            mean_reward: r.capability.mean_reward,
            marginals: r.marginals.marginal_rates(),
            independence_product: r.marginals.independence_product(),
        })
        .collect();
    write_csv(&spec.path(schema::CAPABILITY_TABLE), &CAPABILITY_TABLE_HEADER, &capability)?;

    let scatter: Vec<ScatterLine> = scatter
        .iter()
        .map(|(c, q, i, seed, reward, outcome)| ScatterLine {
            controller: c,
            quality: *q,
            rollout: *i,
            seed: *seed,
            cumulative_reward: *reward,
            outcome: *outcome,
        })
        .collect();
    write_csv(&spec.path(schema::REWARD_SCATTER), &REWARD_SCATTER_HEADER, &scatter)?;
    Ok(rows)
}
