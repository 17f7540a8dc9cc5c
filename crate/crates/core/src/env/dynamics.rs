use thiserror::Error;

use super::{ControlInput, LanderParams, LanderState, OperatingCondition};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SimError {
    #[error("state became non-finite")]
    NonFinite,
}

/// One semi-implicit Euler step of the planar lander.
///
/// The gust is drawn from `gusts`, which the caller keys to the rollout.
pub fn step(
    state: &LanderState,
    control: &ControlInput,
    condition: &OperatingCondition,
    params: &LanderParams,
    dt: f64,
    gusts: &mut StreamRng,
) -> Result<LanderState, SimError> {
    if !state.is_finite() {
        return Err(SimError::NonFinite);
    }
    let u = control.clamped();
    let thrust_accel = params.max_thrust * u.thrust * condition.actuator_gain / params.mass;
    let gust = gusts.normal(condition.wind_gust_sd);

    let ax = thrust_accel * state.theta.sin() + condition.wind_mean + gust;
    let az = thrust_accel * state.theta.cos() - params.gravity;
    let alpha = params.max_torque / params.inertia * u.elevator;

    let vx = state.vx + ax * dt;
    let vz = state.vz + az * dt;
    let omega = state.omega + alpha * dt;
    let next = LanderState {
        x: state.x + vx * dt,
        z: state.z + vz * dt,
        vx,
        vz,
        theta: state.theta + omega * dt,
        omega,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(SimError::NonFinite)
    }
}

/// Normalized (left, right) leg contact indicators at touchdown.
///
/// The legs sit at `-leg_offset` and `+leg_offset` along the body's lateral
/// axis. With the body reference at ground level, a leg tip's height is
/// `-offset sin(theta)`, and the indicator is `1 - |height| / leg_length`
/// clamped to [0, 1].
pub fn contact_indicators(z: f64, theta: f64, params: &LanderParams) -> (f64, f64) {
    let tip = |offset: f64| z - offset * theta.sin();
    let indicator = |h: f64| (1.0 - h.abs() / params.leg_length).clamp(0.0, 1.0);
    (indicator(tip(-params.leg_offset)), indicator(tip(params.leg_offset)))
}
