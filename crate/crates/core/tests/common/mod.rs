// SPDX-License-Identifier: MIT OR Apache-2.0

//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here is deliberately naive: direct sums, full window scans and
//! exhaustive enumeration. Speed is irrelevant; obviousness is the point.

#![allow(dead_code)]

use sara::simulation::{generate, TruthSpec};
use sara::{DiagnosticProfile, Series};

/// `D(x, h)` by summing both windows from scratch. `x` is 1-based.
pub fn direct_diagnostic(y: &[f64], x: usize, h: usize) -> f64 {
    let left: f64 = y[x - h..x].iter().sum();
    let right: f64 = y[x..x + h].iter().sum();
    (left - right) / h as f64
}

/// Local maximizers of `|D|` by checking every window member, followed by
/// the leftmost-wins spacing filter.
pub fn window_check_maximizers(profile: &DiagnosticProfile, radius: usize) -> Vec<usize> {
    let abs: Vec<f64> = profile.values().iter().map(|d| d.abs()).collect();
    let m = abs.len();
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for i in 0..m {
        let lo = i.saturating_sub(radius - 1);
        let hi = (i + radius - 1).min(m - 1);
        let is_max = (lo..=hi).all(|k| abs[i] >= abs[k]);
        if is_max && last.is_none_or(|l| i - l >= radius) {
            last = Some(i);
            out.push(profile.domain_start() + i);
        }
    }
    out
}

/// RSS of the piecewise-constant least-squares fit with the given
/// 1-based change-points (each is the last index of its segment).
pub fn brute_rss(y: &[f64], cps: &[usize]) -> f64 {
    let mut bounds = vec![0];
    bounds.extend_from_slice(cps);
    bounds.push(y.len());
    bounds
        .windows(2)
        .map(|w| {
            let seg = &y[w[0]..w[1]];
            let mean = seg.iter().sum::<f64>() / seg.len() as f64;
            seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        })
        .sum()
}

/// Every strictly increasing `j`-subset of `1..n`.
pub fn placements(n: usize, j: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for t in start..n {
            cur.push(t);
            go(t + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, j, &mut Vec::new(), &mut out);
    out
}

/// Piecewise-constant signal plus `N(0, sigma^2)` noise.
pub fn noisy_steps(n: usize, cps: &[usize], jumps: &[f64], sigma: f64, seed: u64) -> Series {
    let spec = TruthSpec::step(n, cps.to_vec(), jumps.to_vec(), sigma).with_seed(seed);
    generate(&spec).unwrap()
}
