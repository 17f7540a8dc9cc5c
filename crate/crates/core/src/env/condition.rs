//! Operating-condition distribution and sampling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::LanderState;
use crate::rng::{Stream, StreamRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("range `{name}` is inverted: [{lo}, {hi}]")]
    InvertedRange { name: &'static str, lo: f64, hi: f64 },
    #[error("range `{name}` must be {requirement}, got [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        requirement: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Closed interval sampled uniformly; serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRange(pub f64, pub f64);

impl UniformRange {
    pub const fn fixed(v: f64) -> Self {
        Self(v, v)
    }

    pub fn lo(&self) -> f64 {
        self.0
    }

    pub fn hi(&self) -> f64 {
        self.1
    }

    fn sample(&self, rng: &mut StreamRng) -> f64 {
        rng.uniform(self.0, self.1)
    }

    fn check(&self, name: &'static str) -> Result<(), ConditionError> {
        if !(self.0.is_finite() && self.1.is_finite()) {
            return Err(ConditionError::OutOfDomain {
                name,
                requirement: "finite",
                lo: self.0,
                hi: self.1,
            });
        }
        if self.0 > self.1 {
            return Err(ConditionError::InvertedRange {
                name,
                lo: self.0,
                hi: self.1,
            });
        }
        Ok(())
    }
}

/// Distribution `G` of operating conditions: independent uniform ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionSpec {
    pub x: UniformRange,
    pub z: UniformRange,
    pub vx: UniformRange,
    pub vz: UniformRange,
    pub theta: UniformRange,
    pub omega: UniformRange,
    pub wind_mean: UniformRange,
    pub wind_gust_sd: UniformRange,
    pub sensor_noise_sd: UniformRange,
    pub actuator_gain: UniformRange,
}

impl Default for ConditionSpec {
    fn default() -> Self {
        Self {
            x: UniformRange(-0.3, 0.3),
            z: UniformRange(0.9, 1.1),
            vx: UniformRange(-0.1, 0.1),
            vz: UniformRange(-0.1, 0.0),
            theta: UniformRange(-0.05, 0.05),
            omega: UniformRange(-0.05, 0.05),
            wind_mean: UniformRange(-0.06, 0.06),
            wind_gust_sd: UniformRange(0.0, 0.05),
            sensor_noise_sd: UniformRange(0.0, 0.01),
            actuator_gain: UniformRange(0.9, 1.1),
        }
    }
}

impl ConditionSpec {
    /// Every range collapsed onto `condition`'s values.
    pub fn fixed(condition: &OperatingCondition) -> Self {
        let s = &condition.initial_state;
        Self {
            x: UniformRange::fixed(s.x),
            z: UniformRange::fixed(s.z),
            vx: UniformRange::fixed(s.vx),
            vz: UniformRange::fixed(s.vz),
            theta: UniformRange::fixed(s.theta),
            omega: UniformRange::fixed(s.omega),
            wind_mean: UniformRange::fixed(condition.wind_mean),
            wind_gust_sd: UniformRange::fixed(condition.wind_gust_sd),
            sensor_noise_sd: UniformRange::fixed(condition.sensor_noise_sd),
            actuator_gain: UniformRange::fixed(condition.actuator_gain),
        }
    }

    /// Nominal calm condition: hover start at altitude 1 over the pad.
    pub fn calm() -> Self {
        Self::fixed(&OperatingCondition {
            initial_state: LanderState {
                z: 1.0,
                ..Default::default()
            },
            wind_mean: 0.0,
            wind_gust_sd: 0.0,
            sensor_noise_sd: 0.0,
            actuator_gain: 1.0,
            seed: 0,
        })
    }

    pub fn validate(&self) -> Result<(), ConditionError> {
        let ranges = [
            ("x", self.x),
            ("z", self.z),
            ("vx", self.vx),
            ("vz", self.vz),
            ("theta", self.theta),
            ("omega", self.omega),
            ("wind_mean", self.wind_mean),
            ("wind_gust_sd", self.wind_gust_sd),
            ("sensor_noise_sd", self.sensor_noise_sd),
            ("actuator_gain", self.actuator_gain),
        ];
        for (name, r) in ranges {
            r.check(name)?;
        }
        for (name, r) in [
            ("wind_gust_sd", self.wind_gust_sd),
            ("sensor_noise_sd", self.sensor_noise_sd),
        ] {
            if r.lo() < 0.0 {
                return Err(ConditionError::OutOfDomain {
                    name,
                    requirement: "nonnegative",
                    lo: r.lo(),
                    hi: r.hi(),
                });
            }
        }
        if self.actuator_gain.lo() <= 0.0 {
            return Err(ConditionError::OutOfDomain {
                name: "actuator_gain",
                requirement: "positive",
                lo: self.actuator_gain.lo(),
                hi: self.actuator_gain.hi(),
            });
        }
        if self.z.lo() <= 0.0 {
            return Err(ConditionError::OutOfDomain {
                name: "z",
                requirement: "above the ground",
                lo: self.z.lo(),
                hi: self.z.hi(),
            });
        }
        Ok(())
    }
}

/// One draw `zeta ~ G`: initial state, disturbance scales and the rollout seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingCondition {
    pub initial_state: LanderState,
    pub wind_mean: f64,
    pub wind_gust_sd: f64,
    pub sensor_noise_sd: f64,
    pub actuator_gain: f64,
    pub seed: u64,
}

/// Deterministic in `(spec, seed)`; draws from the seed's condition stream.
pub fn sample_operating_condition(spec: &ConditionSpec, seed: u64) -> Result<OperatingCondition, ConditionError> {
    spec.validate()?;
    let mut rng = StreamRng::new(seed, Stream::Condition);
    let initial_state = LanderState {
        x: spec.x.sample(&mut rng),
        z: spec.z.sample(&mut rng),
        vx: spec.vx.sample(&mut rng),
        vz: spec.vz.sample(&mut rng),
        theta: spec.theta.sample(&mut rng),
        omega: spec.omega.sample(&mut rng),
    };
    Ok(OperatingCondition {
        initial_state,
        wind_mean: spec.wind_mean.sample(&mut rng),
        wind_gust_sd: spec.wind_gust_sd.sample(&mut rng),
        sensor_noise_sd: spec.sensor_noise_sd.sample(&mut rng),
        actuator_gain: spec.actuator_gain.sample(&mut rng),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rollout_seed;

    #[test]
    fn degenerate_spec_gives_nominal_condition() {
        let spec = ConditionSpec::calm();
        for seed in [0, 1, 12345, u64::MAX] {
            let c = sample_operating_condition(&spec, seed).unwrap();
            assert_eq!(c.initial_state, LanderState { z: 1.0, ..Default::default() });
            assert_eq!(c.wind_mean, 0.0);
            assert_eq!(c.actuator_gain, 1.0);
            assert_eq!(c.seed, seed);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = ConditionSpec::default();
        let a = sample_operating_condition(&spec, 77).unwrap();
        let b = sample_operating_condition(&spec, 77).unwrap();
        assert_eq!(a, b);
        let c = sample_operating_condition(&spec, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn altitude_mean_within_clt_bound() {
        let spec = ConditionSpec::default();
        let n = 100_000;
        let sum: f64 = (0..n)
            .map(|i| sample_operating_condition(&spec, rollout_seed(2024, i)).unwrap().initial_state.z)
            .sum();
        let mean = sum / n as f64;
        // sd of the mean = 0.2 / sqrt(12 n) ~ 1.8e-4; 3 sigma < 1e-3
        assert!((mean - 1.0).abs() < 1e-3, "{mean}");
    }

    #[test]
    fn samples_stay_in_range() {
        let spec = ConditionSpec::default();
        for i in 0..2000 {
            let c = sample_operating_condition(&spec, rollout_seed(5, i)).unwrap();
            assert!((0.9..=1.1).contains(&c.initial_state.z));
            assert!((0.9..=1.1).contains(&c.actuator_gain));
            assert!(c.wind_gust_sd >= 0.0);
        }
    }

    #[test]
    fn inverted_and_invalid_ranges_are_rejected() {
        let spec = ConditionSpec {
            z: UniformRange(1.1, 0.9),
            ..Default::default()
        };
        assert!(matches!(
            sample_operating_condition(&spec, 1),
            Err(ConditionError::InvertedRange { name: "z", .. })
        ));
        let spec = ConditionSpec {
            wind_gust_sd: UniformRange(-0.1, 0.1),
            ..Default::default()
        };
        assert!(spec.validate().is_err());
        let spec = ConditionSpec {
            actuator_gain: UniformRange(0.0, 1.0),
            ..Default::default()
        };
        assert!(spec.validate().is_err());
        let spec = ConditionSpec {
            x: UniformRange(f64::NAN, 1.0),
            ..Default::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ConditionSpec::default();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"z\":[0.9,1.1]"));
        let back: ConditionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
