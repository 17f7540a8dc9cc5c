//! Monte Carlo capability estimators over seeded rollout batches.
//!
//! Rollout `i` of a batch uses `rollout_seed(base_seed, i)` for both its
//! operating condition and its internal streams, so a batch is a pure
//! function of `(policy, spec, base_seed)` no matter how it is scheduled.

use rayon::prelude::*;
use thiserror::Error;

use super::condition::{sample_operating_condition, ConditionError, ConditionSpec};
use super::rollout::{run_rollout, RolloutError, RolloutOutcome};
use super::SimLimits;
use crate::controllers::Policy;
use crate::rng::{child_seed, rollout_seed};
use crate::safety::{SafetyThresholds, CONSTRAINT_COUNT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Rollout(#[from] RolloutError),
    #[error("invalid estimator input: {0}")]
    Invalid(String),
}

/// Runs rollouts `start..start + count` in index order.
///
/// `parallelism` bounds the worker count; results are identical for any value.
#[allow(clippy::too_many_arguments)]
pub fn run_batch(
    policy: &dyn Policy,
    spec: &ConditionSpec,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
    base_seed: u64,
    start: u64,
    count: u64,
    parallelism: usize,
) -> Result<Vec<RolloutOutcome>, EstimateError> {
    spec.validate()?;
    let one = |i: u64| -> Result<RolloutOutcome, EstimateError> {
        let seed = rollout_seed(base_seed, i);
        let condition = sample_operating_condition(spec, seed)?;
        Ok(run_rollout(policy, &condition, thresholds, limits)?)
    };
    if parallelism <= 1 {
        return (start..start + count).map(one).collect();
    }
    if rayon::current_num_threads() == parallelism {
        return (start..start + count).into_par_iter().map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| EstimateError::Invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (start..start + count).into_par_iter().map(one).collect())
}

#[allow(clippy::too_many_arguments)]
fn fold_batch<T, F>(
    policy: &dyn Policy,
    spec: &ConditionSpec,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
    base_seed: u64,
    n: u64,
    init: T,
    add: F,
) -> Result<T, EstimateError>
where
    T: Send + Clone,
    F: Fn(T, &RolloutOutcome) -> T + Sync,
{
    // Chunked so memory stays flat for large n.
    const CHUNK: u64 = 4096;
    let mut acc = init;
    let mut start = 0;
    while start < n {
        let count = CHUNK.min(n - start);
        let batch = run_batch(policy, spec, thresholds, limits, base_seed, start, count, rayon::current_num_threads())?;
        for o in &batch {
            acc = add(acc, o);
        }
        start += count;
    }
    Ok(acc)
}

/// Empirical success rate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CapabilityEstimate {
    pub n: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub std_error: f64,
    pub mean_reward: f64,
}

impl CapabilityEstimate {
    fn from_counts(n: u64, successes: u64, reward_sum: f64) -> Self {
        let p_hat = successes as f64 / n as f64;
        Self {
            n,
            successes,
            p_hat,
            std_error: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            mean_reward: reward_sum / n as f64,
        }
    }
}

/// Monte Carlo estimate of `P(safe landing | policy, G)` over `n` rollouts.
pub fn estimate_capability(
    policy: &dyn Policy,
    spec: &ConditionSpec,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
    n: u64,
    base_seed: u64,
) -> Result<CapabilityEstimate, EstimateError> {
    if n == 0 {
        return Err(EstimateError::Invalid("n must be at least 1".into()));
    }
    let (s, reward) = fold_batch(policy, spec, thresholds, limits, base_seed, n, (0u64, 0.0f64), |(s, r), o| {
        (s + u64::from(o.outcome), r + o.cumulative_reward)
    })?;
    Ok(CapabilityEstimate::from_counts(n, s, reward))
}

/// Per-constraint and joint satisfaction counts from the same rollouts.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MarginalEstimate {
    pub n: u64,
    pub joint: u64,
    pub per_constraint: [u64; CONSTRAINT_COUNT],
    pub reward_sum: f64,
}

impl MarginalEstimate {
    pub fn capability(&self) -> CapabilityEstimate {
        CapabilityEstimate::from_counts(self.n, self.joint, self.reward_sum)
    }

    pub fn joint_rate(&self) -> f64 {
        self.joint as f64 / self.n as f64
    }

    pub fn marginal_rates(&self) -> [f64; CONSTRAINT_COUNT] {
        self.per_constraint.map(|c| c as f64 / self.n as f64)
    }

    /// Product of marginal rates, the joint rate under independence.
    pub fn independence_product(&self) -> f64 {
        self.marginal_rates().iter().product()
    }
}

pub fn estimate_marginal_capabilities(
    policy: &dyn Policy,
    spec: &ConditionSpec,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
    n: u64,
    base_seed: u64,
) -> Result<MarginalEstimate, EstimateError> {
    if n == 0 {
        return Err(EstimateError::Invalid("n must be at least 1".into()));
    }
    let init = MarginalEstimate {
        n,
        joint: 0,
        per_constraint: [0; CONSTRAINT_COUNT],
        reward_sum: 0.0,
    };
    fold_batch(policy, spec, thresholds, limits, base_seed, n, init, |mut acc, o| {
        acc.joint += u64::from(o.verdict.safe);
        acc.reward_sum += o.cumulative_reward;
        for (c, &flag) in acc.per_constraint.iter_mut().zip(o.verdict.constraint_flags.iter()) {
            *c += u64::from(flag);
        }
        acc
    })
}

/// One cell of an operating-condition grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightedCondition {
    pub spec: ConditionSpec,
    pub weight: f64,
}

/// Plug-in estimate of `E_{zeta ~ G}[p(zeta)] = sum_k w_k p_hat(zeta_k)`.
pub fn estimate_robust_capability(
    policy: &dyn Policy,
    grid: &[WeightedCondition],
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
    n_per_condition: u64,
    base_seed: u64,
) -> Result<f64, EstimateError> {
    if grid.is_empty() {
        return Err(EstimateError::Invalid("condition grid is empty".into()));
    }
    if grid.iter().any(|c| !(c.weight >= 0.0 && c.weight.is_finite())) {
        return Err(EstimateError::Invalid("grid weights must be nonnegative".into()));
    }
    let total: f64 = grid.iter().map(|c| c.weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(EstimateError::Invalid(format!("grid weights sum to {total}, expected 1")));
    }
    let mut robust = 0.0;
    for (k, cell) in grid.iter().enumerate() {
        if cell.weight == 0.0 {
            continue;
        }
        let seed = if grid.len() == 1 { base_seed } else { child_seed(base_seed, k as u64) };
        let est = estimate_capability(policy, &cell.spec, thresholds, limits, n_per_condition, seed)?;
        robust += cell.weight * est.p_hat;
    }
    Ok(robust)
}
