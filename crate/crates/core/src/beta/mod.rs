//! Conjugate Beta-Bernoulli inference over a controller's landing capability.
//!
//! Rollout outcomes are Bernoulli draws with an unknown success probability.
//! Starting from a `Beta(alpha0, beta0)` prior, `S` successes and `F`
//! failures give the posterior `Beta(alpha0 + S, beta0 + F)`. Deployment is
//! judged on the posterior mass above the reliability requirement `p0`:
//!
//! - approval probability `q = P(p >= p0 | data) = 1 - I_{p0}(alpha, beta)`
//! - false-approval risk `r = P(p < p0 | data) = 1 - q`

mod special;

pub use special::{ln_beta, ln_gamma, regularized_incomplete_beta, CF_MAX_ITER, CF_TOLERANCE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BetaError {
    #[error("beta shape parameters must be positive and finite (alpha = {alpha}, beta = {beta})")]
    InvalidShape { alpha: f64, beta: f64 },
    #[error("value {value} is outside [0, 1]")]
    OutOfUnitInterval { value: f64 },
    #[error("reliability threshold p0 = {p0} must lie strictly inside (0, 1)")]
    InvalidThreshold { p0: f64 },
    #[error(
        "incomplete beta continued fraction did not converge after {iterations} iterations \
         (x = {x}, a = {alpha}, b = {beta})"
    )]
    NoConvergence {
        x: f64,
        alpha: f64,
        beta: f64,
        iterations: usize,
    },
}

/// Shape pair of a Beta distribution over the landing capability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBetaParams")]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawBetaParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawBetaParams> for BetaParams {
    type Error = BetaError;

    fn try_from(raw: RawBetaParams) -> Result<Self, Self::Error> {
        BetaParams::new(raw.alpha, raw.beta)
    }
}

impl Default for BetaParams {
    fn default() -> Self {
        Self::uniform()
    }
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, BetaError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(alpha) && ok(beta) {
            Ok(Self { alpha, beta })
        } else {
            Err(BetaError::InvalidShape { alpha, beta })
        }
    }

    /// The uniform prior Beta(1, 1).
    pub const fn uniform() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let sum = self.alpha + self.beta;
        self.alpha * self.beta / (sum * sum * (sum + 1.0))
    }

    /// `P(p <= x)` under this distribution.
    pub fn cdf(&self, x: f64) -> Result<f64, BetaError> {
        regularized_incomplete_beta(x, self.alpha, self.beta)
    }

    pub fn update(&self, successes: u64, failures: u64) -> Self {
        posterior_update(*self, successes, failures)
    }
}

/// Conjugate update: `Beta(alpha + S, beta + F)`.
pub fn posterior_update(prior: BetaParams, successes: u64, failures: u64) -> BetaParams {
    BetaParams {
        alpha: prior.alpha + successes as f64,
        beta: prior.beta + failures as f64,
    }
}

fn check_threshold(p0: f64) -> Result<(), BetaError> {
    if p0 > 0.0 && p0 < 1.0 {
        Ok(())
    } else {
        Err(BetaError::InvalidThreshold { p0 })
    }
}

/// Posterior probability that the capability meets `p0`.
pub fn approval_probability(posterior: &BetaParams, p0: f64) -> Result<f64, BetaError> {
    check_threshold(p0)?;
    Ok(1.0 - posterior.cdf(p0)?)
}

/// Posterior probability that the capability falls short of `p0`.
pub fn false_approval_risk(posterior: &BetaParams, p0: f64) -> Result<f64, BetaError> {
    Ok(1.0 - approval_probability(posterior, p0)?)
}

/// Posterior moments plus the approval/risk pair at a fixed requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapabilitySummary {
    pub mean: f64,
    pub variance: f64,
    pub approval_probability: f64,
    pub false_approval_risk: f64,
}

pub fn capability_summary(posterior: &BetaParams, p0: f64) -> Result<CapabilitySummary, BetaError> {
    let q = approval_probability(posterior, p0)?;
    Ok(CapabilitySummary {
        mean: posterior.mean(),
        variance: posterior.variance(),
        approval_probability: q,
        false_approval_risk: 1.0 - q,
    })
}
