//! Touchdown safety evaluation.
//!
//! A landing is safe only when all six touchdown constraints hold at once:
//! position, vertical speed, pitch, horizontal speed, and both leg contacts.
//! Comparisons are inclusive. A rollout that never touched down (crash or
//! horizon timeout) fails every constraint.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("tolerance `{name}` must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("contact threshold must lie in (0, 1], got {0}")]
    Contact(f64),
    #[error("target `{name}` must be finite, got {value}")]
    NonFiniteTarget { name: &'static str, value: f64 },
}

/// Number of touchdown constraints.
pub const CONSTRAINT_COUNT: usize = 6;

/// Constraint names in flag order.
pub const CONSTRAINT_NAMES: [&str; CONSTRAINT_COUNT] = [
    "position",
    "vertical_speed",
    "pitch",
    "horizontal_speed",
    "left_contact",
    "right_contact",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SafetyThresholds {
    pub delta_x: f64,
    pub delta_v: f64,
    pub delta_theta: f64,
    pub delta_vx: f64,
    pub delta_c: f64,
    pub x_target: f64,
    pub vx_target: f64,
}

impl Default for SafetyThresholds {
    fn default() -> Self {
        Self {
            delta_x: 0.20,
            delta_v: 0.15,
            delta_theta: 0.10,
            delta_vx: 0.15,
            delta_c: 0.50,
            x_target: 0.0,
            vx_target: 0.0,
        }
    }
}

impl SafetyThresholds {
    pub fn validate(&self) -> Result<(), ThresholdError> {
        for (name, value) in [
            ("delta_x", self.delta_x),
            ("delta_v", self.delta_v),
            ("delta_theta", self.delta_theta),
            ("delta_vx", self.delta_vx),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ThresholdError::NonPositive { name, value });
            }
        }
        if !(self.delta_c > 0.0 && self.delta_c <= 1.0) {
            return Err(ThresholdError::Contact(self.delta_c));
        }
        for (name, value) in [("x_target", self.x_target), ("vx_target", self.vx_target)] {
            if !value.is_finite() {
                return Err(ThresholdError::NonFiniteTarget { name, value });
            }
        }
        Ok(())
    }
}

/// Terminal-state quantities that enter the safe-landing event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchdownRecord {
    pub x: f64,
    pub vz: f64,
    pub theta: f64,
    pub vx: f64,
    pub contact_left: f64,
    pub contact_right: f64,
    pub touched_down: bool,
}

impl TouchdownRecord {
    /// Builds a record for a valid touchdown, clamping contacts into [0, 1].
    pub fn landed(x: f64, vz: f64, theta: f64, vx: f64, contact_left: f64, contact_right: f64) -> Self {
        Self {
            x,
            vz,
            theta,
            vx,
            contact_left: clamp_unit(contact_left),
            contact_right: clamp_unit(contact_right),
            touched_down: true,
        }
    }

    /// Crash or timeout: no valid touchdown state.
    pub fn no_touchdown(x: f64, vz: f64, theta: f64, vx: f64) -> Self {
        Self {
            x,
            vz,
            theta,
            vx,
            contact_left: 0.0,
            contact_right: 0.0,
            touched_down: false,
        }
    }
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafetyVerdict {
    pub safe: bool,
    /// position, vertical speed, pitch, horizontal speed, left contact, right contact
    pub constraint_flags: [bool; CONSTRAINT_COUNT],
}

impl SafetyVerdict {
    pub fn from_flags(constraint_flags: [bool; CONSTRAINT_COUNT]) -> Self {
        Self {
            safe: constraint_flags.iter().all(|&f| f),
            constraint_flags,
        }
    }
}

pub fn evaluate_safety(record: &TouchdownRecord, thresholds: &SafetyThresholds) -> SafetyVerdict {
    if !record.touched_down {
        return SafetyVerdict::from_flags([false; CONSTRAINT_COUNT]);
    }
    // NaN compares false, so a non-finite record fails the affected flag.
    SafetyVerdict::from_flags([
        (record.x - thresholds.x_target).abs() <= thresholds.delta_x,
        record.vz.abs() <= thresholds.delta_v,
        record.theta.abs() <= thresholds.delta_theta,
        (record.vx - thresholds.vx_target).abs() <= thresholds.delta_vx,
        record.contact_left >= thresholds.delta_c,
        record.contact_right >= thresholds.delta_c,
    ])
}

/// 1 for a safe landing, 0 otherwise.
pub fn bernoulli_outcome(verdict: &SafetyVerdict) -> u8 {
    u8::from(verdict.safe)
}
