// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::BTreeMap;

use super::studies::PowerPoint;
use super::TruthSpec;
use crate::selection::SegmentationModel;

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionOutcome {
    /// One flag per true change-point.
    pub detected: Vec<bool>,
    /// Estimates with no true change-point within the tolerance.
    pub false_discoveries: usize,
}

/// Matches estimates to true change-points within `tol`.
///
/// Pairs are matched greedily by increasing distance (ties by true then
/// estimated position), each estimate serving at most one truth. An
/// estimate is a false discovery when no truth lies within `tol`, whether
/// or not it was matched.
pub fn detection_metrics(
    truth: &TruthSpec,
    estimate: &SegmentationModel,
    tol: usize,
) -> DetectionOutcome {
    match_changepoints(&truth.changepoints, &estimate.changepoints, tol)
}

pub(crate) fn match_changepoints(truth: &[usize], est: &[usize], tol: usize) -> DetectionOutcome {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (j, &t) in truth.iter().enumerate() {
        for (k, &e) in est.iter().enumerate() {
            let d = t.abs_diff(e);
            if d <= tol {
                pairs.push((d, j, k));
            }
        }
    }
    pairs.sort_unstable();
    let mut detected = vec![false; truth.len()];
    let mut used = vec![false; est.len()];
    for (_, j, k) in pairs {
        if !detected[j] && !used[k] {
            detected[j] = true;
            used[k] = true;
        }
    }
    let false_discoveries = est
        .iter()
        .filter(|&&e| truth.iter().all(|&t| t.abs_diff(e) > tol))
        .count();
    DetectionOutcome {
        detected,
        false_discoveries,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Coverage {
    /// Fraction of replicates with an estimate strictly within the
    /// coverage radius of this change-point.
    pub fraction: f64,
    /// Mean distance to the nearest estimate over covered replicates.
    pub mean_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StudyReport {
    pub replicate_count: usize,
    pub num_true: usize,
    pub jhat_histogram: BTreeMap<usize, usize>,
    pub scp_per_cp: Vec<Coverage>,
    /// Fraction with `J_hat = J` and every sorted estimate strictly within
    /// the radius of its true change-point.
    pub sure_coverage: f64,
    pub detection_rate_per_cp: Vec<f64>,
    pub afd: f64,
    pub power: Vec<PowerPoint>,
}

impl StudyReport {
    pub fn fraction_jhat(&self, pred: impl Fn(usize) -> bool) -> f64 {
        let hits: usize = self
            .jhat_histogram
            .iter()
            .filter(|(&j, _)| pred(j))
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.replicate_count.max(1) as f64
    }

    pub fn mean_jhat(&self) -> f64 {
        let total: usize = self.jhat_histogram.iter().map(|(&j, &c)| j * c).sum();
        total as f64 / self.replicate_count.max(1) as f64
    }
}

/// What one replicate contributes to a [`StudyReport`].
#[derive(Clone, Debug)]
pub(crate) struct ReplicateOutcome {
    jhat: usize,
    nearest: Vec<Option<usize>>,
    joint: bool,
    detection: DetectionOutcome,
}

impl ReplicateOutcome {
    pub fn score(truth: &[usize], est: &[usize], radius: usize, tol: usize) -> Self {
        let nearest = truth
            .iter()
            .map(|&t| {
                est.iter()
                    .map(|&e| t.abs_diff(e))
                    .min()
                    .filter(|&d| d < radius)
            })
            .collect();
        let joint = est.len() == truth.len()
            && truth.iter().zip(est).all(|(&t, &e)| t.abs_diff(e) < radius);
        Self {
            jhat: est.len(),
            nearest,
            joint,
            detection: match_changepoints(truth, est, tol),
        }
    }
}

pub(crate) fn summarize(num_true: usize, outcomes: &[ReplicateOutcome]) -> StudyReport {
    let reps = outcomes.len();
    let denom = reps.max(1) as f64;
    let mut hist = BTreeMap::new();
    let mut covered = vec![0usize; num_true];
    let mut err_sum = vec![0usize; num_true];
    let mut detected = vec![0usize; num_true];
    let mut joint = 0;
    let mut fd = 0;
    for o in outcomes {
        *hist.entry(o.jhat).or_insert(0) += 1;
        for j in 0..num_true {
            if let Some(d) = o.nearest[j] {
                covered[j] += 1;
                err_sum[j] += d;
            }
            if o.detection.detected[j] {
                detected[j] += 1;
            }
        }
        joint += o.joint as usize;
        fd += o.detection.false_discoveries;
    }
    StudyReport {
        replicate_count: reps,
        num_true,
        jhat_histogram: hist,
        scp_per_cp: covered
            .iter()
            .zip(&err_sum)
            .map(|(&c, &e)| Coverage {
                fraction: c as f64 / denom,
                mean_error: if c > 0 { e as f64 / c as f64 } else { 0.0 },
            })
            .collect(),
        sure_coverage: joint as f64 / denom,
        detection_rate_per_cp: detected.iter().map(|&d| d as f64 / denom).collect(),
        afd: fd as f64 / denom,
        power: Vec::new(),
    }
}
