//! Episode integration, touchdown detection and the diagnostic reward.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dynamics::{contact_indicators, step};
use super::{ControlInput, LanderState, OperatingCondition, SimLimits};
use crate::controllers::{Policy, PolicyError};
use crate::rng::{Stream, StreamRng};
use crate::safety::{bernoulli_outcome, evaluate_safety, SafetyThresholds, SafetyVerdict, TouchdownRecord};

/// Descent rate of the reward's reference glide line (altitude per unit time).
pub const GLIDE_RATE: f64 = 0.2;
pub const SAFE_LANDING_BONUS: f64 = 100.0;
pub const CRASH_PENALTY: f64 = -100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RolloutError {
    #[error("policy failed at step {step}: {source}")]
    Policy {
        step: u32,
        #[source]
        source: PolicyError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Touchdown,
    Crash,
    Timeout,
    /// Outcome emitted directly by a synthetic policy.
    Synthetic,
}

/// Result of one validation rollout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RolloutOutcome {
    pub outcome: u8,
    pub verdict: SafetyVerdict,
    pub touchdown: TouchdownRecord,
    pub cumulative_reward: f64,
    pub steps: u32,
    pub seed: u64,
    pub termination: Termination,
}

impl RolloutOutcome {
    pub fn from_record(
        touchdown: TouchdownRecord,
        thresholds: &SafetyThresholds,
        cumulative_reward: f64,
        steps: u32,
        seed: u64,
        termination: Termination,
    ) -> Self {
        let verdict = evaluate_safety(&touchdown, thresholds);
        Self {
            outcome: bernoulli_outcome(&verdict),
            verdict,
            touchdown,
            cumulative_reward,
            steps,
            seed,
            termination,
        }
    }

    pub fn is_safe(&self) -> bool {
        self.outcome == 1
    }
}

/// Column order of the per-rollout trajectory CSV.
pub const TRAJECTORY_HEADER: [&str; 11] = [
    "step", "t", "x", "z", "vx", "vz", "theta", "omega", "thrust", "elevator", "reward",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: u32,
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub vx: f64,
    pub vz: f64,
    pub theta: f64,
    pub omega: f64,
    pub thrust: f64,
    pub elevator: f64,
    pub reward: f64,
}

impl TrajectoryRow {
    fn new(step: u32, t: f64, s: &LanderState, u: &ControlInput, reward: f64) -> Self {
        Self {
            step,
            t,
            x: s.x,
            z: s.z,
            vx: s.vx,
            vz: s.vz,
            theta: s.theta,
            omega: s.omega,
            thrust: u.thrust,
            elevator: u.elevator,
            reward,
        }
    }
}

pub fn run_rollout(
    policy: &dyn Policy,
    condition: &OperatingCondition,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
) -> Result<RolloutOutcome, RolloutError> {
    simulate(policy, condition, thresholds, limits, None)
}

/// Like [`run_rollout`], also returning one row per integration step.
pub fn run_rollout_traced(
    policy: &dyn Policy,
    condition: &OperatingCondition,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
) -> Result<(RolloutOutcome, Vec<TrajectoryRow>), RolloutError> {
    let mut rows = Vec::new();
    let outcome = simulate(policy, condition, thresholds, limits, Some(&mut rows))?;
    Ok((outcome, rows))
}

fn observe(state: &LanderState, sd: f64, rng: &mut StreamRng) -> LanderState {
    if sd == 0.0 {
        return *state;
    }
    LanderState {
        x: state.x + rng.normal(sd),
        z: state.z + rng.normal(sd),
        vx: state.vx + rng.normal(sd),
        vz: state.vz + rng.normal(sd),
        theta: state.theta + rng.normal(sd),
        omega: state.omega + rng.normal(sd),
    }
}

fn shaping_reward(state: &LanderState, control: &ControlInput, z0: f64, t: f64) -> f64 {
    let glide = (z0 - GLIDE_RATE * t).max(0.0);
    -(0.1 * (state.z - glide).abs() + 0.05 * state.theta.abs()) - 0.01 * control.thrust
}

fn simulate(
    policy: &dyn Policy,
    condition: &OperatingCondition,
    thresholds: &SafetyThresholds,
    limits: &SimLimits,
    mut trace: Option<&mut Vec<TrajectoryRow>>,
) -> Result<RolloutOutcome, RolloutError> {
    if let Some(outcome) = policy.direct_outcome(condition.seed, thresholds) {
        return Ok(outcome);
    }

    let params = &limits.lander;
    let dt = limits.dt;
    let z0 = condition.initial_state.z;
    let mut gusts = StreamRng::new(condition.seed, Stream::Gust);
    let mut sensor = StreamRng::new(condition.seed, Stream::Sensor);
    let mut policy_rng = StreamRng::new(condition.seed.wrapping_add(policy.noise_seed_offset()), Stream::Policy);

    let mut state = condition.initial_state;
    let mut reward = 0.0;
    let mut discount = 1.0;

    for k in 0..limits.max_steps {
        let t = k as f64 * dt;
        let observed = observe(&state, condition.sensor_noise_sd, &mut sensor);
        let control = policy
            .act(&observed, &mut policy_rng)
            .map_err(|source| RolloutError::Policy { step: k, source })?
            .clamped();
        let r = shaping_reward(&state, &control, z0, t);
        reward += discount * r;
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TrajectoryRow::new(k, t, &state, &control, r));
        }
        let steps = k + 1;

        let next = match step(&state, &control, condition, params, dt, &mut gusts) {
            Ok(next) => next,
            Err(_) => {
                // instability
                reward += discount * CRASH_PENALTY;
                let rec = TouchdownRecord::no_touchdown(state.x, state.vz, state.theta, state.vx);
                return Ok(RolloutOutcome::from_record(
                    rec,
                    thresholds,
                    reward,
                    steps,
                    condition.seed,
                    Termination::Crash,
                ));
            }
        };
        discount *= limits.gamma;

        if next.z <= 0.0 {
            let frac = state.z / (state.z - next.z);
            let at = state.lerp(&next, frac);
            let (left, right) = contact_indicators(at.z, at.theta, params);
            let rec = TouchdownRecord::landed(at.x, at.vz, at.theta, at.vx, left, right);
            let verdict = evaluate_safety(&rec, thresholds);
            if verdict.safe {
                reward += discount * SAFE_LANDING_BONUS;
            }
            if let Some(rows) = trace.as_deref_mut() {
                let bonus = if verdict.safe { SAFE_LANDING_BONUS } else { 0.0 };
                rows.push(TrajectoryRow::new(steps, (k as f64 + frac) * dt, &at, &ControlInput::default(), bonus));
            }
            return Ok(RolloutOutcome::from_record(
                rec,
                thresholds,
                reward,
                steps,
                condition.seed,
                Termination::Touchdown,
            ));
        }

        if next.theta.abs() > params.tumble_limit {
            reward += discount * CRASH_PENALTY;
            if let Some(rows) = trace.as_deref_mut() {
                rows.push(TrajectoryRow::new(steps, steps as f64 * dt, &next, &ControlInput::default(), CRASH_PENALTY));
            }
            let rec = TouchdownRecord::no_touchdown(next.x, next.vz, next.theta, next.vx);
            return Ok(RolloutOutcome::from_record(
                rec,
                thresholds,
                reward,
                steps,
                condition.seed,
                Termination::Crash,
            ));
        }
        state = next;
    }

    if let Some(rows) = trace {
        rows.push(TrajectoryRow::new(
            limits.max_steps,
            limits.max_steps as f64 * dt,
            &state,
            &ControlInput::default(),
            0.0,
        ));
    }
    let rec = TouchdownRecord::no_touchdown(state.x, state.vz, state.theta, state.vx);
    Ok(RolloutOutcome::from_record(
        rec,
        thresholds,
        reward,
        limits.max_steps,
        condition.seed,
        Termination::Timeout,
    ))
}
