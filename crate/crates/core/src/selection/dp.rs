// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact least-squares segmentation by dynamic programming.
//!
//! Quadratic in `n`, so it is guarded to short series and used as a
//! reference for the fast selection routines.

use crate::error::{Result, SaraError};
use crate::series::Series;

pub const DP_MAX_LEN: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct DpSolution {
    pub num_changepoints: usize,
    pub changepoints: Vec<usize>,
    pub sigma2: f64,
}

/// Optimal change-point sets for every model size `0..=jmax`.
///
/// Entry `j` minimizes RSS over all placements of `j` change-points, and
/// reports `sigma2 = RSS / n`. Sizes above `n - 1` are skipped.
pub fn exhaustive_dp_oracle(series: &Series, jmax: usize) -> Result<Vec<DpSolution>> {
    let y = series.values();
    let n = y.len();
    if n > DP_MAX_LEN {
        return Err(SaraError::SeriesTooLong { n, max: DP_MAX_LEN });
    }
    let jmax = jmax.min(n - 1);

    let center = y.iter().sum::<f64>() / n as f64;
    let mut p = vec![0.0; n + 1];
    let mut q = vec![0.0; n + 1];
    for (i, v) in y.iter().enumerate() {
        let c = v - center;
        p[i + 1] = p[i] + c;
        q[i + 1] = q[i] + c * c;
    }
    // RSS of 0-based half-open range [s, t).
    let cost = |s: usize, t: usize| -> f64 {
        let sum = p[t] - p[s];
        ((q[t] - q[s]) - sum * sum / (t - s) as f64).max(0.0)
    };

    // best[k][t]: min RSS of y[..t] split into k+1 segments.
    let mut best = vec![vec![f64::INFINITY; n + 1]; jmax + 1];
    let mut arg = vec![vec![0usize; n + 1]; jmax + 1];
    for (t, slot) in best[0].iter_mut().enumerate().skip(1) {
        *slot = cost(0, t);
    }
    for k in 1..=jmax {
        for t in (k + 1)..=n {
            let mut b = f64::INFINITY;
            let mut a = 0;
            for (s, prev) in best[k - 1].iter().enumerate().take(t).skip(k) {
                let c = prev + cost(s, t);
                if c < b {
                    b = c;
                    a = s;
                }
            }
            best[k][t] = b;
            arg[k][t] = a;
        }
    }

    let solutions = (0..=jmax)
        .map(|k| {
            let mut cps = Vec::with_capacity(k);
            let mut t = n;
            for level in (1..=k).rev() {
                t = arg[level][t];
                cps.push(t);
            }
            cps.reverse();
            DpSolution {
                num_changepoints: k,
                changepoints: cps,
                sigma2: best[k][n] / n as f64,
            }
        })
        .collect();
    Ok(solutions)
}
