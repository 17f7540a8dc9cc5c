//! Seeded planar lander simulator.
//!
//! Point mass plus attitude in the vertical plane, nondimensionalized so that
//! `m = g = I = 1`. Thrust acts along the body axis, the elevator produces a
//! pitch torque, and the wind enters as a horizontal acceleration bias plus a
//! per-step Gaussian gust:
//!
//! ```text
//! ax = (F_max T k / m) sin(theta) + w + gust
//! az = (F_max T k / m) cos(theta) - g
//! alpha = (tau_max / I) delta
//! ```
//!
//! Integration is semi-implicit Euler (velocities first, then positions).

mod condition;
mod dynamics;
mod estimate;
mod rollout;

pub use condition::{sample_operating_condition, ConditionError, ConditionSpec, OperatingCondition, UniformRange};
pub use dynamics::{contact_indicators, step, SimError};
pub use estimate::{
    estimate_capability, estimate_marginal_capabilities, estimate_robust_capability, run_batch, CapabilityEstimate,
    EstimateError, MarginalEstimate, WeightedCondition,
};
pub use rollout::{
    run_rollout, run_rollout_traced, RolloutError, CRASH_PENALTY, GLIDE_RATE, SAFE_LANDING_BONUS, RolloutOutcome, Termination, TrajectoryRow, TRAJECTORY_HEADER,
};

use serde::{Deserialize, Serialize};

/// Planar lander state `(x, z, vx, vz, theta, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LanderState {
    pub x: f64,
    pub z: f64,
    pub vx: f64,
    pub vz: f64,
    pub theta: f64,
    pub omega: f64,
}

impl LanderState {
    pub fn is_finite(&self) -> bool {
        [self.x, self.z, self.vx, self.vz, self.theta, self.omega]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Linear interpolation `self + t (other - self)`.
    pub fn lerp(&self, other: &LanderState, t: f64) -> LanderState {
        let l = |a: f64, b: f64| a + t * (b - a);
        LanderState {
            x: l(self.x, other.x),
            z: l(self.z, other.z),
            vx: l(self.vx, other.vx),
            vz: l(self.vz, other.vz),
            theta: l(self.theta, other.theta),
            omega: l(self.omega, other.omega),
        }
    }
}

/// Normalized thrust in `[0, 1]` and elevator in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub thrust: f64,
    pub elevator: f64,
}

impl ControlInput {
    pub fn new(thrust: f64, elevator: f64) -> Self {
        Self { thrust, elevator }
    }

    pub fn clamped(&self) -> Self {
        Self {
            thrust: self.thrust.clamp(0.0, 1.0),
            elevator: self.elevator.clamp(-1.0, 1.0),
        }
    }
}

/// Physical constants of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanderParams {
    pub mass: f64,
    pub gravity: f64,
    pub max_thrust: f64,
    pub max_torque: f64,
    pub inertia: f64,
    /// Lateral offset of each leg from the body centre line.
    pub leg_offset: f64,
    /// Contact normalisation length.
    pub leg_length: f64,
    /// |theta| beyond this is a tumble.
    pub tumble_limit: f64,
}

impl Default for LanderParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            gravity: 1.0,
            max_thrust: 1.8,
            max_torque: 4.0,
            inertia: 1.0,
            leg_offset: 0.1,
            leg_length: 0.05,
            tumble_limit: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl LanderParams {
    /// Thrust command that balances gravity at pitch `theta` with unit actuator gain.
    pub fn hover_thrust(&self, theta: f64) -> f64 {
        self.mass * self.gravity / (self.max_thrust * theta.cos())
    }
}

/// Integration and episode settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimLimits {
    pub dt: f64,
    pub max_steps: u32,
    /// Discount factor of the diagnostic reward.
    pub gamma: f64,
    pub lander: LanderParams,
}

impl Default for SimLimits {
    fn default() -> Self {
        Self {
            dt: 0.02,
            max_steps: 1500,
            gamma: 0.99,
            lander: LanderParams::default(),
        }
    }
}

impl SimLimits {
    pub fn validate(&self) -> Result<(), ConditionError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConditionError::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.max_steps == 0 {
            return Err(ConditionError::Invalid("max_steps must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(ConditionError::Invalid(format!("gamma must be in (0, 1], got {}", self.gamma)));
        }
        let p = &self.lander;
        for (name, v) in [
            ("mass", p.mass),
            ("gravity", p.gravity),
            ("max_thrust", p.max_thrust),
            ("max_torque", p.max_torque),
            ("inertia", p.inertia),
            ("leg_offset", p.leg_offset),
            ("leg_length", p.leg_length),
            ("tumble_limit", p.tumble_limit),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConditionError::Invalid(format!("lander.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
