//! Exact session outcome probabilities by dynamic programming over the
//! success count, for i.i.d. Bernoulli(p) outcomes.

use landing_approval::beta::{approval_probability, posterior_update};
use landing_approval::sequential::ValidationConfig;

#[derive(Debug, Clone, Copy)]
pub struct ExactSession {
    pub approve: f64,
    pub reject: f64,
    pub exhaust: f64,
    pub mean_stop: f64,
}

pub fn exact_session(p: f64, cfg: &ValidationConfig) -> ExactSession {
    let n_max = cfg.n_max as usize;
    // mass[s] = P(still running after n rollouts with s successes)
    let mut mass = vec![0.0; n_max + 2];
    mass[0] = 1.0;
    let (mut approve, mut reject, mut mean_stop) = (0.0, 0.0, 0.0);
    for n in 1..=n_max {
        let mut next = vec![0.0; n_max + 2];
        for s in 0..n {
            next[s + 1] += mass[s] * p;
            next[s] += mass[s] * (1.0 - p);
        }
        if n >= cfg.n_min as usize {
            for (s, m) in next.iter_mut().enumerate().take(n + 1) {
                if *m == 0.0 {
                    continue;
                }
                let post = posterior_update(cfg.prior, s as u64, (n - s) as u64);
                let q = approval_probability(&post, cfg.p0).unwrap();
                if q >= cfg.tau_a {
                    approve += *m;
                } else if q <= cfg.tau_r {
                    reject += *m;
                } else {
                    continue;
                }
                mean_stop += *m * n as f64;
                *m = 0.0;
            }
        }
        mass = next;
    }
    let exhaust: f64 = mass.iter().sum();
    ExactSession {
        approve,
        reject,
        exhaust,
        mean_stop: mean_stop + exhaust * n_max as f64,
    }
}
