//! The single JSON experiment config.
//!
//! Every section is optional; absent fields take the built-in defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::beta::BetaParams;
use crate::controllers::PolicySpec;
use crate::env::{ConditionSpec, SimLimits};
use crate::safety::SafetyThresholds;
use crate::sequential::ValidationConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionSection {
    pub p0: f64,
    pub tau_a: f64,
    pub tau_r: f64,
    pub n_min: u32,
    pub n_max: u32,
}

impl Default for DecisionSection {
    fn default() -> Self {
        let v = ValidationConfig::default();
        Self {
            p0: v.p0,
            tau_a: v.tau_a,
            tau_r: v.tau_r,
            n_min: v.n_min,
            n_max: v.n_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentSection {
    pub conditions: ConditionSpec,
    pub limits: SimLimits,
    /// Write one trajectory CSV per validation rollout.
    pub dump_trajectories: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateSection {
    pub true_p: Vec<f64>,
    pub sessions: u32,
}

impl Default for CalibrateSection {
    fn default() -> Self {
        Self {
            true_p: vec![0.4, 0.9, 0.95, 0.99, 0.999],
            sessions: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub count: usize,
    pub quality_low: f64,
    pub quality_high: f64,
    /// Rollouts per member for the capability estimate.
    pub oracle_n: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            count: 10,
            quality_low: 0.3,
            quality_high: 1.0,
            oracle_n: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundarySection {
    /// Reliability thresholds to tabulate; empty means the decision `p0` only.
    pub p0_grid: Vec<f64>,
}

impl Default for BoundarySection {
    fn default() -> Self {
        Self { p0_grid: vec![0.9, 0.95, 0.99] }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub calibrate: CalibrateSection,
    pub sweep: SweepSection,
    pub boundary: BoundarySection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub prior: BetaParams,
    pub decision: DecisionSection,
    pub thresholds: SafetyThresholds,
    pub environment: EnvironmentSection,
    pub policy: PolicySpec,
    pub experiment: ExperimentSection,
}

impl HarnessConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validation(&self) -> ValidationConfig {
        ValidationConfig {
            p0: self.decision.p0,
            tau_a: self.decision.tau_a,
            tau_r: self.decision.tau_r,
            prior: self.prior,
            n_min: self.decision.n_min,
            n_max: self.decision.n_max,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |e: &dyn std::fmt::Display| HarnessError::Config(e.to_string());
        self.validation().validate().map_err(|e| bad(&e))?;
        self.thresholds.validate().map_err(|e| bad(&e))?;
        self.environment.conditions.validate().map_err(|e| bad(&e))?;
        self.environment.limits.validate().map_err(|e| bad(&e))?;
        self.policy.validate().map_err(|e| bad(&e))?;

        let cal = &self.experiment.calibrate;
        if cal.sessions == 0 {
            return Err(HarnessError::Config("experiment.calibrate.sessions must be at least 1".into()));
        }
        if let Some(p) = cal.true_p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(HarnessError::Config(format!("experiment.calibrate.true_p entry {p} is outside [0, 1]")));
        }
        let sweep = &self.experiment.sweep;
        if sweep.oracle_n == 0 {
            return Err(HarnessError::Config("experiment.sweep.oracle_n must be at least 1".into()));
        }
        crate::controllers::checkpoint_ladder(sweep.count, sweep.quality_low, sweep.quality_high)
            .map_err(|e| bad(&e))?;
        if let Some(p) = self.experiment.boundary.p0_grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(HarnessError::Config(format!("experiment.boundary.p0_grid entry {p} is outside (0, 1)")));
        }
        Ok(())
    }
}
