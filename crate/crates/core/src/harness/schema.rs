//! Artifact file names and CSV column orders.
//!
//! `docs/schemas.md` documents each file with a golden example.

pub const SESSION_LOG: &str = "session.jsonl";
pub const SUMMARY: &str = "summary.json";
pub const APPROVAL_TRACE: &str = "approval_trace.csv";
pub const TRAJECTORY_DIR: &str = "trajectories";
pub const BOUNDARY: &str = "boundary.csv";
pub const BOUNDARY_MINIMUM: &str = "boundary_min.csv";
pub const CALIBRATION: &str = "calibrate.csv";
pub const DECISION_TABLE: &str = "sweep_decisions.csv";
pub const STOPPING_TABLE: &str = "sweep_stopping.csv";
pub const CAPABILITY_TABLE: &str = "sweep_capability.csv";
pub const REWARD_SCATTER: &str = "sweep_reward_scatter.csv";
pub const REPORT: &str = "report.md";
pub const TRACE_CHART: &str = "approval_trace.svg";
pub const BOUNDARY_CHART: &str = "boundary.svg";

pub const APPROVAL_TRACE_HEADER: [&str; 6] = ["n", "successes", "failures", "p_hat", "q", "decision"];

pub const BOUNDARY_HEADER: [&str; 5] = ["p0", "n", "successes", "q", "approve"];

pub const BOUNDARY_MINIMUM_HEADER: [&str; 3] = ["p0", "n", "min_approving_successes"];

pub const CALIBRATION_HEADER: [&str; 8] = [
    "true_p",
    "sessions",
    "approve_freq",
    "reject_freq",
    "exhaust_freq",
    "mean_stopping_time",
    "validation_saving",
    "false_approval_freq",
];

pub const DECISION_TABLE_HEADER: [&str; 9] = [
    "controller",
    "quality",
    "rollouts",
    "successes",
    "p_hat",
    "empirical_decision",
    "q_n",
    "bayesian_decision",
    "mismatch",
];

pub const STOPPING_TABLE_HEADER: [&str; 5] = ["controller", "quality", "stopping_rollout", "final_decision", "status"];

pub const CAPABILITY_TABLE_HEADER: [&str; 14] = [
    "controller",
    "quality",
    "n",
    "successes",
    "p_hat",
    "std_error",
    "mean_reward",
    "p_position",
    "p_vertical_speed",
    "p_pitch",
    "p_horizontal_speed",
    "p_left_contact",
    "p_right_contact",
    "independence_product",
];

pub const REWARD_SCATTER_HEADER: [&str; 6] = ["controller", "quality", "rollout", "seed", "cumulative_reward", "outcome"];

/// Files each command leaves in the output directory.
pub fn expected_outputs(command: super::Command) -> &'static [&'static str] {
    use super::Command::*;
    match command {
        Validate => &[SESSION_LOG, SUMMARY, APPROVAL_TRACE],
        Boundary => &[BOUNDARY, BOUNDARY_MINIMUM],
        Calibrate => &[CALIBRATION],
        Sweep => &[DECISION_TABLE, STOPPING_TABLE, CAPABILITY_TABLE, REWARD_SCATTER],
        Report => &[REPORT],
    }
}
