// SPDX-License-Identifier: MIT OR Apache-2.0

//! Least-squares segment fitting and BIC-type model selection.
//!
//! Change-points are 1-based: `tau` closes a segment, so segment `j`
//! covers indices `(tau_j, tau_{j+1}]` with `tau_0 = 0` and
//! `tau_{J+1} = n`.
//!
//! A fit whose variance estimate is numerically zero scores `-inf`, so a
//! perfect fit always wins over any model with residual noise. Among
//! several perfect fits the smaller one wins.

mod dp;
mod stats;

pub use dp::{exhaustive_dp_oracle, DpSolution, DP_MAX_LEN};

use crate::diagnostics::CandidateSet;
use crate::error::{Result, SaraError};
use crate::series::Series;
use stats::SegStats;

/// Relative floor under which `sigma2` counts as an exact fit.
const DEGENERATE_REL: f64 = 1e-20;

/// Pool size up to which [`best_subset`] is allowed.
pub const BEST_SUBSET_MAX: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InfoCriterion {
    Bic,
    Mbic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelCriterion {
    Threshold,
    Bic,
    Mbic,
}

impl From<InfoCriterion> for ModelCriterion {
    fn from(c: InfoCriterion) -> Self {
        match c {
            InfoCriterion::Bic => ModelCriterion::Bic,
            InfoCriterion::Mbic => ModelCriterion::Mbic,
        }
    }
}

/// A fitted piecewise-constant model.
///
/// For `Threshold` models `score` holds the threshold that was applied;
/// for `Bic`/`Mbic` it holds the criterion value (lower is better).
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationModel {
    pub changepoints: Vec<usize>,
    pub segment_means: Vec<f64>,
    pub sigma2_hat: f64,
    pub criterion: ModelCriterion,
    pub score: f64,
}

impl SegmentationModel {
    pub fn num_changepoints(&self) -> usize {
        self.changepoints.len()
    }

    /// `delta_j = beta_j - beta_{j-1}`.
    pub fn jump_sizes(&self) -> Vec<f64> {
        self.segment_means.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Segments as 1-based inclusive `(start, end, mean)` triples.
    pub fn segments(&self, n: usize) -> Vec<(usize, usize, f64)> {
        let mut bounds = Vec::with_capacity(self.changepoints.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&self.changepoints);
        bounds.push(n);
        bounds
            .windows(2)
            .zip(&self.segment_means)
            .map(|(w, &m)| (w[0] + 1, w[1], m))
            .collect()
    }
}

pub fn validate_changepoints(changepoints: &[usize], n: usize) -> Result<()> {
    for (i, &c) in changepoints.iter().enumerate() {
        if c == 0 || c >= n {
            return Err(SaraError::InvalidChangepoints(format!(
                "{c} at index {i} is outside (0, {n})"
            )));
        }
        if i > 0 && changepoints[i - 1] >= c {
            return Err(SaraError::InvalidChangepoints(format!(
                "{} followed by {c} is not strictly increasing",
                changepoints[i - 1]
            )));
        }
    }
    Ok(())
}

fn degenerate_floor(y: &[f64]) -> f64 {
    DEGENERATE_REL * y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64
}

/// Penalty part of the criterion: `J log n` for BIC; for mBIC
/// `(3/2) J log n + (1/2) sum log(spacing / n)`.
pub fn criterion_penalty(criterion: InfoCriterion, n: usize, changepoints: &[usize]) -> f64 {
    let j = changepoints.len() as f64;
    let ln_n = (n as f64).ln();
    match criterion {
        InfoCriterion::Bic => j * ln_n,
        InfoCriterion::Mbic => 1.5 * j * ln_n + 0.5 * log_spacing_sum(n, changepoints),
    }
}

fn log_spacing_sum(n: usize, changepoints: &[usize]) -> f64 {
    let nf = n as f64;
    let mut prev = 0;
    let mut total = 0.0;
    for &c in changepoints.iter().chain(std::iter::once(&n)) {
        total += ((c - prev) as f64 / nf).ln();
        prev = c;
    }
    total
}

struct Scorer {
    n: usize,
    floor: f64,
    criterion: InfoCriterion,
}

impl Scorer {
    fn new(y: &[f64], criterion: InfoCriterion) -> Self {
        Self {
            n: y.len(),
            floor: degenerate_floor(y),
            criterion,
        }
    }

    /// Score from the variance and the number of change-points plus their
    /// summed log spacings.
    fn score(&self, sigma2: f64, j: usize, log_spacing: f64) -> f64 {
        if sigma2 <= self.floor {
            return f64::NEG_INFINITY;
        }
        let nf = self.n as f64;
        let jf = j as f64;
        let fit = 0.5 * nf * sigma2.ln();
        match self.criterion {
            InfoCriterion::Bic => fit + jf * nf.ln(),
            InfoCriterion::Mbic => fit + 1.5 * jf * nf.ln() + 0.5 * log_spacing,
        }
    }

    fn score_of(&self, sigma2: f64, changepoints: &[usize]) -> f64 {
        self.score(
            sigma2,
            changepoints.len(),
            log_spacing_sum(self.n, changepoints),
        )
    }
}

fn split_stats(y: &[f64], changepoints: &[usize]) -> Vec<SegStats> {
    let mut prev = 0;
    let mut out = Vec::with_capacity(changepoints.len() + 1);
    for &c in changepoints.iter().chain(std::iter::once(&y.len())) {
        out.push(SegStats::of(&y[prev..c]));
        prev = c;
    }
    out
}

fn model_from(
    series: &Series,
    changepoints: Vec<usize>,
    criterion: InfoCriterion,
) -> SegmentationModel {
    let y = series.values();
    let segs = split_stats(y, &changepoints);
    let sigma2 = segs.iter().map(|s| s.rss).sum::<f64>() / y.len() as f64;
    let score = Scorer::new(y, criterion).score_of(sigma2, &changepoints);
    SegmentationModel {
        segment_means: segs.iter().map(|s| s.mean).collect(),
        changepoints,
        sigma2_hat: sigma2,
        criterion: criterion.into(),
        score,
    }
}

/// Least-squares fit for fixed change-points. The model is scored by BIC.
pub fn fit_segments(series: &Series, changepoints: &[usize]) -> Result<SegmentationModel> {
    validate_changepoints(changepoints, series.len())?;
    Ok(model_from(
        series,
        changepoints.to_vec(),
        InfoCriterion::Bic,
    ))
}

/// `(n/2) log sigma2 + J log n`; `-inf` for an exact fit.
pub fn bic_score(series: &Series, changepoints: &[usize]) -> Result<f64> {
    validate_changepoints(changepoints, series.len())?;
    Ok(model_from(series, changepoints.to_vec(), InfoCriterion::Bic).score)
}

/// `(n/2) log sigma2 + (3/2) J log n + (1/2) sum log(spacing/n)`;
/// `-inf` for an exact fit.
pub fn mbic_score(series: &Series, changepoints: &[usize]) -> Result<f64> {
    validate_changepoints(changepoints, series.len())?;
    Ok(model_from(series, changepoints.to_vec(), InfoCriterion::Mbic).score)
}

/// Criterion value after plugging in the top-`j` ranked candidates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub num_changepoints: usize,
    pub sigma2: f64,
    pub score: f64,
}

/// Largest model size worth ranking: `min(candidates, n / (2 h_min))`.
pub fn default_jmax(n: usize, num_candidates: usize, h_min: usize) -> usize {
    num_candidates.min(n / (2 * h_min.max(1)))
}

/// Doubly linked list over sorted boundaries with the segment statistics
/// between them. Removing a boundary pools its two neighbouring segments.
struct Blocks {
    positions: Vec<usize>,
    first: SegStats,
    after: Vec<SegStats>,
    prev: Vec<Option<usize>>,
    next: Vec<Option<usize>>,
    alive: Vec<bool>,
    rss: f64,
    log_spacing: f64,
    count: usize,
    n: usize,
}

impl Blocks {
    fn new(y: &[f64], sorted: Vec<usize>) -> Self {
        let k = sorted.len();
        let segs = split_stats(y, &sorted);
        let rss = segs.iter().map(|s| s.rss).sum();
        let log_spacing = log_spacing_sum(y.len(), &sorted);
        Self {
            first: segs[0],
            after: segs[1..].to_vec(),
            prev: (0..k).map(|i| i.checked_sub(1)).collect(),
            next: (0..k).map(|i| (i + 1 < k).then_some(i + 1)).collect(),
            alive: vec![true; k],
            positions: sorted,
            rss,
            log_spacing,
            count: k,
            n: y.len(),
        }
    }

    fn left_of(&self, s: usize) -> &SegStats {
        match self.prev[s] {
            Some(p) => &self.after[p],
            None => &self.first,
        }
    }

    /// `(rss increase, log-spacing change)` of removing boundary `s`.
    fn removal_delta(&self, s: usize) -> (f64, f64) {
        let (l, r) = (self.left_of(s), &self.after[s]);
        let nf = self.n as f64;
        let ln = |len: usize| (len as f64 / nf).ln();
        (l.merge_cost(r), ln(l.len + r.len) - ln(l.len) - ln(r.len))
    }

    fn remove(&mut self, s: usize) {
        debug_assert!(self.alive[s]);
        let (d_rss, d_space) = self.removal_delta(s);
        let merged = self.left_of(s).merge(&self.after[s]);
        match self.prev[s] {
            Some(p) => {
                self.after[p] = merged;
                self.next[p] = self.next[s];
            }
            None => self.first = merged,
        }
        if let Some(nx) = self.next[s] {
            self.prev[nx] = self.prev[s];
        }
        self.alive[s] = false;
        self.rss += d_rss;
        self.log_spacing += d_space;
        self.count -= 1;
    }

    fn sigma2(&self) -> f64 {
        self.rss.max(0.0) / self.n as f64
    }

    fn live_positions(&self) -> Vec<usize> {
        self.positions
            .iter()
            .zip(&self.alive)
            .filter_map(|(&p, &a)| a.then_some(p))
            .collect()
    }
}

fn distinct_sorted(positions: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    validate_changepoints(&sorted, n)?;
    Ok(sorted)
}

/// Criterion values for `J = 0..=jmax` using the top-`J` candidates.
///
/// Computed from the full top-`jmax` split downwards, pooling segments
/// as lower-ranked candidates drop out, in O(n + jmax log jmax).
pub fn rank_path(
    series: &Series,
    cands: &CandidateSet,
    criterion: InfoCriterion,
    jmax: usize,
) -> Result<Vec<PathPoint>> {
    let y = series.values();
    let jmax = jmax.min(cands.len());
    let ranked: Vec<usize> = cands.entries()[..jmax].iter().map(|c| c.position).collect();
    let sorted = distinct_sorted(&ranked, y.len())?;
    let scorer = Scorer::new(y, criterion);

    let mut blocks = Blocks::new(y, sorted);
    let mut path = vec![
        PathPoint {
            num_changepoints: 0,
            sigma2: 0.0,
            score: 0.0,
        };
        jmax + 1
    ];
    let record = |blocks: &Blocks| PathPoint {
        num_changepoints: blocks.count,
        sigma2: blocks.sigma2(),
        score: scorer.score(blocks.sigma2(), blocks.count, blocks.log_spacing),
    };
    path[jmax] = record(&blocks);
    for j in (1..=jmax).rev() {
        let s = blocks
            .positions
            .binary_search(&ranked[j - 1])
            .expect("ranked position is a boundary");
        blocks.remove(s);
        path[j - 1] = record(&blocks);
    }
    Ok(path)
}

/// Ranking selection: the number of change-points minimizing the
/// criterion over prefixes of the ranked candidate list.
pub fn rank_select(
    series: &Series,
    cands: &CandidateSet,
    criterion: InfoCriterion,
    jmax: usize,
) -> Result<SegmentationModel> {
    let path = rank_path(series, cands, criterion, jmax)?;
    let best = path
        .iter()
        .enumerate()
        .fold(0, |b, (j, p)| if p.score < path[b].score { j } else { b });
    let mut chosen: Vec<usize> = cands.entries()[..best].iter().map(|c| c.position).collect();
    chosen.sort_unstable();
    Ok(model_from(series, chosen, criterion))
}

/// Backward stepwise deletion from a candidate pool.
///
/// Each step drops the candidate whose removal increases RSS least. The
/// search stops as soon as the criterion would strictly increase, so the
/// returned model is the lowest-scoring one visited.
pub fn backward_stepwise(
    series: &Series,
    pool: &CandidateSet,
    criterion: InfoCriterion,
) -> Result<SegmentationModel> {
    let y = series.values();
    let sorted = distinct_sorted(&pool.positions(), y.len())?;
    let scorer = Scorer::new(y, criterion);
    let mut blocks = Blocks::new(y, sorted);
    let mut current = scorer.score(blocks.sigma2(), blocks.count, blocks.log_spacing);

    while blocks.count > 0 {
        let mut pick: Option<(usize, f64, f64)> = None;
        for s in (0..blocks.positions.len()).filter(|&s| blocks.alive[s]) {
            let (d_rss, d_space) = blocks.removal_delta(s);
            if pick.is_none_or(|(_, best, _)| d_rss < best) {
                pick = Some((s, d_rss, d_space));
            }
        }
        let (s, d_rss, d_space) = pick.expect("at least one live boundary");
        let sigma2 = (blocks.rss + d_rss).max(0.0) / y.len() as f64;
        let next = scorer.score(sigma2, blocks.count - 1, blocks.log_spacing + d_space);
        if next > current {
            break;
        }
        blocks.remove(s);
        current = next;
    }
    Ok(model_from(series, blocks.live_positions(), criterion))
}

/// Improves a model by majorize-minimize over subsets of the pool.
///
/// `(n/2) log RSS` is concave in RSS, so its tangent at the current RSS
/// bounds it from above. With that substitution the criterion is additive
/// over segments and is minimized exactly over all subsets of the pool by
/// dynamic programming. Repeating from the new RSS never increases the true
/// criterion, so the result scores no worse than `start`. Each round costs
/// O(k^2) for a pool of `k`.
pub fn refine_subset(
    series: &Series,
    pool: &CandidateSet,
    criterion: InfoCriterion,
    start: &[usize],
) -> Result<SegmentationModel> {
    const MAX_ROUNDS: usize = 100;
    let y = series.values();
    let n = y.len();
    let nf = n as f64;
    let sorted = distinct_sorted(&pool.positions(), n)?;
    let start = distinct_sorted(start, n)?;
    let blocks = split_stats(y, &sorted);
    let k = blocks.len();
    let floor = degenerate_floor(y);
    let per_cp = match criterion {
        InfoCriterion::Bic => nf.ln(),
        InfoCriterion::Mbic => 1.5 * nf.ln(),
    };
    let spacing = |len: usize| match criterion {
        InfoCriterion::Bic => 0.0,
        InfoCriterion::Mbic => 0.5 * (len as f64 / nf).ln(),
    };

    let mut current = model_from(series, start, criterion);
    for _ in 0..MAX_ROUNDS {
        let rss0 = current.sigma2_hat * nf;
        if rss0 <= floor * nf {
            break;
        }
        let w = nf / (2.0 * rss0);
        // cost[j]: best majorizer value over blocks[..j] ending in a boundary.
        let mut cost = vec![f64::INFINITY; k + 1];
        let mut from = vec![0usize; k + 1];
        cost[0] = -per_cp;
        for j in 1..=k {
            let mut seg = blocks[j - 1];
            for i in (0..j).rev() {
                if i < j - 1 {
                    seg = blocks[i].merge(&seg);
                }
                let c = cost[i] + per_cp + w * seg.rss + spacing(seg.len);
                if c < cost[j] {
                    cost[j] = c;
                    from[j] = i;
                }
            }
        }
        let mut chosen = Vec::new();
        let mut j = from[k];
        while j > 0 {
            chosen.push(sorted[j - 1]);
            j = from[j];
        }
        chosen.reverse();
        let next = model_from(series, chosen, criterion);
        if next.score < current.score {
            current = next;
        } else {
            break;
        }
    }
    Ok(current)
}

/// Exhaustive search over all subsets of the pool.
///
/// Ties in score go to the smaller model. Pools above
/// [`BEST_SUBSET_MAX`] are rejected.
pub fn best_subset(
    series: &Series,
    pool: &CandidateSet,
    criterion: InfoCriterion,
) -> Result<SegmentationModel> {
    let y = series.values();
    let sorted = distinct_sorted(&pool.positions(), y.len())?;
    let k = sorted.len();
    if k > BEST_SUBSET_MAX {
        return Err(SaraError::InvalidConfig(format!(
            "best subset over {k} candidates exceeds the limit of {BEST_SUBSET_MAX}"
        )));
    }
    let scorer = Scorer::new(y, criterion);
    let blocks = split_stats(y, &sorted);
    let n = y.len() as f64;

    let mut best: Option<(f64, u32, u32)> = None;
    let mut chosen = Vec::with_capacity(k);
    for mask in 0u32..(1u32 << k) {
        let mut seg = blocks[0];
        let mut rss = 0.0;
        let mut log_spacing = 0.0;
        for (i, block) in blocks[1..].iter().enumerate() {
            if mask & (1 << i) != 0 {
                rss += seg.rss;
                log_spacing += (seg.len as f64 / n).ln();
                seg = *block;
            } else {
                seg = seg.merge(block);
            }
        }
        rss += seg.rss;
        log_spacing += (seg.len as f64 / n).ln();
        let j = mask.count_ones();
        let score = scorer.score(rss.max(0.0) / n, j as usize, log_spacing);
        let better = match best {
            None => true,
            Some((bs, bj, _)) => score < bs || (score == bs && j < bj),
        };
        if better {
            best = Some((score, j, mask));
        }
    }
    let (_, _, mask) = best.expect("at least the empty subset");
    chosen.extend((0..k).filter(|i| mask & (1 << i) != 0).map(|i| sorted[i]));
    Ok(model_from(series, chosen, criterion))
}

/// Noise level from residuals of a moving-average (local constant) fit.
///
/// The fit at `i` averages `Y_j` for `|j - i| <= h`, truncated at the
/// ends; the result is `sqrt(RSS / n)`.
pub fn estimate_sigma(series: &Series, h: usize) -> f64 {
    let y = series.values();
    let n = y.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in y.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    let rss: f64 = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h + 1).min(n);
            let fit = (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
            (y[i] - fit).powi(2)
        })
        .sum();
    (rss / n as f64).sqrt()
}
