//! `boundary`: approval probability against success count at the horizon.

use serde::{Deserialize, Serialize};

use super::schema::{self, BOUNDARY_HEADER, BOUNDARY_MINIMUM_HEADER};
use super::{write_csv, ExperimentSpec, HarnessError};
use crate::beta::{approval_probability, posterior_update};
use crate::sequential::ValidationConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub p0: f64,
    pub n: u32,
    pub successes: u32,
    pub q: f64,
    pub approve: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMinimum {
    pub p0: f64,
    pub n: u32,
    /// `None` when even a perfect record falls short of the approval threshold.
    pub min_approving_successes: Option<u32>,
}

pub fn boundary_rows(config: &ValidationConfig) -> Result<(Vec<BoundaryRow>, BoundaryMinimum), HarnessError> {
    let n = config.n_max;
    let mut rows = Vec::with_capacity(n as usize + 1);
    for s in 0..=n {
        let q = approval_probability(&posterior_update(config.prior, s.into(), (n - s).into()), config.p0)?;
        rows.push(BoundaryRow {
            p0: config.p0,
            n,
            successes: s,
            q,
            approve: q >= config.tau_a,
        });
    }
    let min = BoundaryMinimum {
        p0: config.p0,
        n,
        min_approving_successes: rows.iter().find(|r| r.approve).map(|r| r.successes),
    };
    Ok((rows, min))
}

pub fn cmd_boundary(spec: &ExperimentSpec) -> Result<Vec<BoundaryMinimum>, HarnessError> {
    let base = spec.config.validation();
    let grid = match spec.config.experiment.boundary.p0_grid.as_slice() {
        [] => vec![base.p0],
        g => g.to_vec(),
    };
    let mut rows = Vec::new();
    let mut minima = Vec::new();
    for p0 in grid {
        let (r, m) = boundary_rows(&ValidationConfig { p0, ..base })?;
        rows.extend(r);
        minima.push(m);
    }
    write_csv(&spec.path(schema::BOUNDARY), &BOUNDARY_HEADER, &rows)?;
    write_csv(&spec.path(schema::BOUNDARY_MINIMUM), &BOUNDARY_MINIMUM_HEADER, &minima)?;
    Ok(minima)
}
