//! Landing policies.
//!
//! Approval never looks inside the controller, so the policy layer is a
//! plain trait. Three families ship with the crate:
//!
//! - `pd_family`: a glide-path PD controller whose `quality` knob scales the
//!   feedback gains and the additive action noise, standing in for a ladder
//!   of training checkpoints;
//! - `synthetic_bernoulli`: emits safe/unsafe outcomes directly with a known
//!   true capability, bypassing the dynamics (used for calibration);
//! - `zero_thrust`: free fall.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{ControlInput, LanderParams, LanderState, RolloutOutcome, Termination, SAFE_LANDING_BONUS};
use crate::rng::{Stream, StreamRng};
use crate::safety::{SafetyThresholds, TouchdownRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("`{operation}` is not available for policy kind {kind:?}")]
    KindMismatch {
        operation: &'static str,
        kind: PolicyKind,
    },
    #[error("invalid policy spec: {0}")]
    InvalidSpec(String),
    #[error("policy produced a non-finite action")]
    NonFiniteAction,
}

/// A controller `u_t = pi(s_t)` (or a draw from `pi(. | s_t)` via `rng`).
pub trait Policy: Sync {
    fn act(&self, observed: &LanderState, rng: &mut StreamRng) -> Result<ControlInput, PolicyError>;

    /// Added to the rollout seed to key this policy's noise stream.
    fn noise_seed_offset(&self) -> u64 {
        0
    }

    /// Policies that emit outcomes without simulating return them here.
    fn direct_outcome(&self, _seed: u64, _thresholds: &SafetyThresholds) -> Option<RolloutOutcome> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    PdFamily,
    SyntheticBernoulli,
    ZeroThrust,
}

/// Gains of the glide-path controller at `quality = 1`.
///
/// Frozen after Monte Carlo certification against the default operating
/// condition distribution; see `README.md` for the certifying run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlideGains {
    /// Reference sink rate at the pad.
    pub touchdown_sink_rate: f64,
    /// Added sink rate per unit altitude.
    pub sink_rate_slope: f64,
    pub max_sink_rate: f64,
    pub k_vz: f64,
    pub k_x: f64,
    pub max_vx_ref: f64,
    pub k_vx: f64,
    pub k_theta: f64,
    pub k_omega: f64,
    /// Pitch command limit aloft and at the ground.
    pub max_pitch: f64,
    pub max_pitch_ground: f64,
    /// Altitude over which the pitch limit blends to its ground value.
    pub pitch_blend_altitude: f64,
    /// Fraction of the feedback gains retained at `quality = 0`.
    pub gain_floor: f64,
    /// Action noise standard deviations at `quality = 0`.
    pub thrust_noise: f64,
    pub elevator_noise: f64,
}

impl Default for GlideGains {
    fn default() -> Self {
        Self {
            touchdown_sink_rate: 0.05,
            sink_rate_slope: 0.4,
            max_sink_rate: 0.5,
            k_vz: 3.0,
            k_x: 0.6,
            max_vx_ref: 0.3,
            k_vx: 1.5,
            k_theta: 12.0,
            k_omega: 6.0,
            max_pitch: 0.3,
            max_pitch_ground: 0.05,
            pitch_blend_altitude: 0.3,
            gain_floor: 0.25,
            thrust_noise: 0.55,
            elevator_noise: 0.3,
        }
    }
}

/// Serializable policy description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// pd_family only.
    pub quality: f64,
    /// synthetic_bernoulli only.
    pub true_p: f64,
    pub noise_seed_offset: u64,
    pub gains: GlideGains,
}

impl Default for PolicySpec {
    fn default() -> Self {
        Self::pd(1.0)
    }
}

impl PolicySpec {
    pub fn pd(quality: f64) -> Self {
        Self {
            kind: PolicyKind::PdFamily,
            quality,
            true_p: 1.0,
            noise_seed_offset: 0,
            gains: GlideGains::default(),
        }
    }

    pub fn synthetic(true_p: f64) -> Self {
        Self {
            kind: PolicyKind::SyntheticBernoulli,
            true_p,
            ..Self::pd(1.0)
        }
    }

    pub fn zero_thrust() -> Self {
        Self {
            kind: PolicyKind::ZeroThrust,
            ..Self::pd(1.0)
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        match self.kind {
            PolicyKind::PdFamily if !(0.0..=1.0).contains(&self.quality) => Err(PolicyError::InvalidSpec(format!(
                "quality must lie in [0, 1], got {}",
                self.quality
            ))),
            PolicyKind::SyntheticBernoulli if !(0.0..=1.0).contains(&self.true_p) => Err(PolicyError::InvalidSpec(
                format!("true_p must lie in [0, 1], got {}", self.true_p),
            )),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            PolicyKind::PdFamily => format!("pd-q{:.4}", self.quality),
            PolicyKind::SyntheticBernoulli => format!("synthetic-p{:.4}", self.true_p),
            PolicyKind::ZeroThrust => "zero-thrust".to_string(),
        }
    }
}

impl Policy for PolicySpec {
    fn act(&self, observed: &LanderState, rng: &mut StreamRng) -> Result<ControlInput, PolicyError> {
        act(self, observed, rng)
    }

    fn noise_seed_offset(&self) -> u64 {
        self.noise_seed_offset
    }

    fn direct_outcome(&self, seed: u64, thresholds: &SafetyThresholds) -> Option<RolloutOutcome> {
        match self.kind {
            PolicyKind::SyntheticBernoulli => synthetic_outcome(self, seed, thresholds).ok(),
            _ => None,
        }
    }
}

pub fn act(spec: &PolicySpec, observed: &LanderState, rng: &mut StreamRng) -> Result<ControlInput, PolicyError> {
    let u = match spec.kind {
        PolicyKind::ZeroThrust => ControlInput::new(0.0, 0.0),
        PolicyKind::PdFamily => glide_path_control(&spec.gains, spec.quality, observed, rng),
        PolicyKind::SyntheticBernoulli => {
            return Err(PolicyError::KindMismatch {
                operation: "act",
                kind: spec.kind,
            })
        }
    };
    if u.thrust.is_finite() && u.elevator.is_finite() {
        Ok(u)
    } else {
        Err(PolicyError::NonFiniteAction)
    }
}

/// PD tracking of a glide path into the pad at `x = 0`.
///
/// The reference sink rate falls linearly with altitude to
/// `touchdown_sink_rate`, and the reference horizontal velocity closes the
/// lateral offset. Vertical feedback sets thrust around the hover
/// feedforward; horizontal feedback is realised through a pitch command,
/// which the inner attitude loop tracks with the elevator.
fn glide_path_control(g: &GlideGains, quality: f64, s: &LanderState, rng: &mut StreamRng) -> ControlInput {
    let nominal = LanderParams::default();
    let scale = g.gain_floor + (1.0 - g.gain_floor) * quality;
    let noise = 1.0 - quality;

    let altitude = s.z.max(0.0);
    let vz_ref = -(g.touchdown_sink_rate + g.sink_rate_slope * altitude).min(g.max_sink_rate);
    let vx_ref = (-g.k_x * scale * s.x).clamp(-g.max_vx_ref, g.max_vx_ref);

    let az = nominal.gravity + scale * g.k_vz * (vz_ref - s.vz);
    let ax = scale * g.k_vx * (vx_ref - s.vx);

    let blend = (altitude / g.pitch_blend_altitude).min(1.0);
    let pitch_limit = g.max_pitch_ground + (g.max_pitch - g.max_pitch_ground) * blend;
    let theta_ref = ax.atan2(az.max(0.1)).clamp(-pitch_limit, pitch_limit);

    let thrust = az.max(0.0) * nominal.mass / (nominal.max_thrust * s.theta.cos().max(0.2));
    let torque = scale * (g.k_theta * (theta_ref - s.theta) - g.k_omega * s.omega);
    let elevator = torque * nominal.inertia / nominal.max_torque;

    let thrust_noise = rng.normal(g.thrust_noise * noise);
    let elevator_noise = rng.normal(g.elevator_noise * noise);
    ControlInput::new(thrust + thrust_noise, elevator + elevator_noise)
}

/// Direct Bernoulli outcome for a synthetic policy, keyed by `seed`.
///
/// Safe draws carry an on-target touchdown record; unsafe draws carry a hard
/// landing at the target that breaks only the vertical-speed tolerance.
pub fn synthetic_outcome(
    spec: &PolicySpec,
    seed: u64,
    thresholds: &SafetyThresholds,
) -> Result<RolloutOutcome, PolicyError> {
    if spec.kind != PolicyKind::SyntheticBernoulli {
        return Err(PolicyError::KindMismatch {
            operation: "synthetic_outcome",
            kind: spec.kind,
        });
    }
    spec.validate()?;
    let mut rng = StreamRng::new(seed.wrapping_add(spec.noise_seed_offset), Stream::Outcome);
    let safe = rng.bernoulli(spec.true_p);
    let (record, reward) = if safe {
        (
            TouchdownRecord::landed(thresholds.x_target, 0.0, 0.0, thresholds.vx_target, 1.0, 1.0),
            SAFE_LANDING_BONUS,
        )
    } else {
        (
            TouchdownRecord::landed(thresholds.x_target, -2.0 * thresholds.delta_v, 0.0, thresholds.vx_target, 1.0, 1.0),
            0.0,
        )
    };
    Ok(RolloutOutcome::from_record(record, thresholds, reward, 0, seed, Termination::Synthetic))
}

/// `count` pd-family specs with evenly spaced quality in `[low, high]`.
pub fn checkpoint_ladder(count: usize, quality_low: f64, quality_high: f64) -> Result<Vec<PolicySpec>, PolicyError> {
    if count < 2 {
        return Err(PolicyError::InvalidSpec(format!("ladder needs at least 2 members, got {count}")));
    }
    if !(0.0..=1.0).contains(&quality_low) || !(0.0..=1.0).contains(&quality_high) || quality_low > quality_high {
        return Err(PolicyError::InvalidSpec(format!(
            "ladder qualities must satisfy 0 <= low <= high <= 1, got [{quality_low}, {quality_high}]"
        )));
    }
    let span = quality_high - quality_low;
    Ok((0..count)
        .map(|i| {
            let q = if i == count - 1 {
                quality_high
            } else {
                quality_low + span * i as f64 / (count - 1) as f64
            };
            PolicySpec::pd(q)
        })
        .collect())
}
