//! Safety constraints are not independent under the default operating conditions.

use landing_approval::controllers::PolicySpec;
use landing_approval::env::{estimate_marginal_capabilities, ConditionSpec, SimLimits};
use landing_approval::safety::SafetyThresholds;

#[test]
fn joint_rate_falls_below_independence_product() {
    let spec = ConditionSpec::default();
    let (thr, limits) = (SafetyThresholds::default(), SimLimits::default());
    let mut gaps = Vec::new();
    for quality in [0.1, 0.15, 0.2] {
        let est = estimate_marginal_capabilities(&PolicySpec::pd(quality), &spec, &thr, &limits, 20_000, 7).unwrap();
        for rate in est.marginal_rates() {
            assert!(rate >= est.joint_rate());
        }
        gaps.push((quality, est.independence_product() - est.joint_rate()));
    }
    assert!(gaps.iter().any(|&(_, g)| g >= 0.01), "product - joint by quality: {gaps:?}");
}

#[test]
fn well_tuned_controller_has_positively_coupled_constraints() {
    let est = estimate_marginal_capabilities(
        &PolicySpec::pd(0.5),
        &ConditionSpec::default(),
        &SafetyThresholds::default(),
        &SimLimits::default(),
        5_000,
        7,
    )
    .unwrap();
    assert!(est.joint_rate() > est.independence_product());
}
