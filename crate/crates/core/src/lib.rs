//! Bayesian deployment approval for landing controllers.
//!
//! A controller is approved when the posterior probability that its true
//! safe-landing rate reaches the required reliability exceeds a threshold,
//! and rejected when it falls below a lower one. Evidence comes from seeded
//! rollouts of a planar lander simulator, each scored as a binary safety
//! outcome.

pub mod beta;
pub mod controllers;
pub mod env;
pub mod harness;
pub mod rng;
pub mod safety;
pub mod sequential;
