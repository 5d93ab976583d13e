// SPDX-License-Identifier: MIT OR Apache-2.0

//! Local diagnostic functions `D(x, h)` and their h-local maximizers.
//!
//! A profile is defined only where the full window `[x-h+1, x+h]` fits,
//! i.e. for `x` in `[h, n-h]`. No partial-window statistics are produced.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::error::{Result, SaraError};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Uniform,
    Epanechnikov,
}

impl Kernel {
    /// Kernel density on `[-1, 1]`.
    pub fn eval(self, u: f64) -> f64 {
        if u.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Uniform => 0.5,
            Kernel::Epanechnikov => 0.75 * (1.0 - u * u),
        }
    }

    /// Scaled kernel `K_h(u) = K(u/h) / h`.
    pub fn scaled(self, u: f64, h: f64) -> f64 {
        self.eval(u / h) / h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightScheme {
    /// Left-window mean minus right-window mean.
    EqualWeight,
    /// Local linear estimate of the first derivative.
    LocalLinear(Kernel),
}

/// `D(x, h)` evaluated over `x = h..=n-h` (1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticProfile {
    bandwidth: usize,
    scheme: WeightScheme,
    domain_start: usize,
    domain_end: usize,
    values: Vec<f64>,
}

impl DiagnosticProfile {
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn domain_start(&self) -> usize {
        self.domain_start
    }

    pub fn domain_end(&self) -> usize {
        self.domain_end
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `D(x, h)` for a position inside the domain.
    pub fn at(&self, x: usize) -> Option<f64> {
        if x < self.domain_start || x > self.domain_end {
            return None;
        }
        self.values.get(x - self.domain_start).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &d)| (self.domain_start + i, d))
    }

    /// Largest `|D|` over the domain.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, d| m.max(d.abs()))
    }

    /// Writes `position<TAB>D` rows. Values use the shortest round-trip
    /// representation, which never loses digits.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "position\tD")?;
        for (x, d) in self.iter() {
            writeln!(out, "{x}\t{d}")?;
        }
        Ok(())
    }
}

fn check_bandwidth(series: &Series, h: usize, min: usize) -> Result<()> {
    if h < min {
        return Err(SaraError::BandwidthNonPositive { h, min });
    }
    let max = series.max_bandwidth();
    if h > max {
        return Err(SaraError::BandwidthTooLarge { h, max });
    }
    Ok(())
}

/// Equal-weight diagnostic, left mean minus right mean over `h` points each.
///
/// The first value is summed directly; the rest follow the O(1) update
/// `D(x+1) = D(x) + (2Y_{x+1} - Y_{x-h+1} - Y_{x+h+1}) / h`.
pub fn equal_weight_diagnostic(series: &Series, h: usize) -> Result<DiagnosticProfile> {
    check_bandwidth(series, h, 1)?;
    let y = series.values();
    let n = y.len();
    let hf = h as f64;
    let (start, end) = (h, n - h);
    let mut values = Vec::with_capacity(end - start + 1);

    // 0-based: Y_x = y[x-1].
    let left: f64 = y[..h].iter().sum();
    let right: f64 = y[h..2 * h].iter().sum();
    let mut d = (left - right) / hf;
    values.push(d);
    for x in start..end {
        d += (2.0 * y[x] - y[x - h] - y[x + h]) / hf;
        values.push(d);
    }

    Ok(DiagnosticProfile {
        bandwidth: h,
        scheme: WeightScheme::EqualWeight,
        domain_start: start,
        domain_end: end,
        values,
    })
}

/// Local linear first-derivative estimate at each domain position.
///
/// Weights are `K_h(i-x) [S0 (i-x) - S1] / (S0 S2 - S1^2)` with
/// `S_l = sum_i K_h(i-x) (i-x)^l`. Cost is O(n h).
pub fn local_linear_diagnostic(
    series: &Series,
    h: usize,
    kernel: Kernel,
) -> Result<DiagnosticProfile> {
    check_bandwidth(series, h, 2)?;
    let y = series.values();
    let n = y.len();
    let hf = h as f64;
    let (start, end) = (h, n - h);

    // Kernel weights depend on the offset only; tabulate them once.
    let offsets: Vec<i64> = (-(h as i64)..=h as i64).collect();
    let k: Vec<f64> = offsets
        .iter()
        .map(|&u| kernel.scaled(u as f64, hf))
        .collect();

    let mut values = Vec::with_capacity(end - start + 1);
    for x in start..=end {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let (mut t0, mut t1) = (0.0, 0.0);
        for (&u, &kw) in offsets.iter().zip(&k) {
            let i = x as i64 + u;
            if i < 1 || i > n as i64 || kw == 0.0 {
                continue;
            }
            let uf = u as f64;
            let yi = y[(i - 1) as usize];
            s0 += kw;
            s1 += kw * uf;
            s2 += kw * uf * uf;
            t0 += kw * yi;
            t1 += kw * uf * yi;
        }
        let denom = s0 * s2 - s1 * s1;
        if denom <= 0.0 || !denom.is_finite() {
            return Err(SaraError::DegenerateDesign { x });
        }
        values.push((s0 * t1 - s1 * t0) / denom);
    }

    Ok(DiagnosticProfile {
        bandwidth: h,
        scheme: WeightScheme::LocalLinear(kernel),
        domain_start: start,
        domain_end: end,
        values,
    })
}

/// Dispatches on the weight scheme.
pub fn diagnostic(series: &Series, h: usize, scheme: WeightScheme) -> Result<DiagnosticProfile> {
    match scheme {
        WeightScheme::EqualWeight => equal_weight_diagnostic(series, h),
        WeightScheme::LocalLinear(kernel) => local_linear_diagnostic(series, h, kernel),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub position: usize,
    pub score: f64,
    pub bandwidth: usize,
}

/// Candidates ordered by descending score, ties broken by ascending position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateSet {
    entries: Vec<Candidate>,
}

impl CandidateSet {
    pub fn new(mut entries: Vec<Candidate>) -> Self {
        entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then(a.position.cmp(&b.position))
        });
        Self { entries }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.entries.iter().map(|c| c.position).collect()
    }

    pub fn into_entries(self) -> Vec<Candidate> {
        self.entries
    }
}

/// h-local maximizers of `|D|`.
///
/// A position is kept when `|D(x)| >= |D(x')|` for every domain `x'` in
/// `(x-h, x+h)`. Among tied maximizers closer than `h`, only the leftmost
/// survives, so kept positions are always at least `h` apart.
pub fn local_maximizers(profile: &DiagnosticProfile) -> CandidateSet {
    local_maximizers_within(profile, profile.bandwidth)
}

/// Local maximizers of `|D|` over the open neighbourhood `(x - r, x + r)`.
///
/// Same tie rule as [`local_maximizers`], which is the case `r = h`: among
/// equal maxima closer than `r`, the leftmost is kept. `r = 0` is treated
/// as `r = 1` (every point is its own neighbourhood).
pub fn local_maximizers_within(profile: &DiagnosticProfile, radius: usize) -> CandidateSet {
    let h = profile.bandwidth;
    let radius = radius.max(1);
    let abs: Vec<f64> = profile.values.iter().map(|d| d.abs()).collect();
    let m = abs.len();
    if m == 0 {
        return CandidateSet::empty();
    }

    // Sliding maximum over the centered window [i-r+1, i+r-1].
    let reach = radius - 1;
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut entries = Vec::new();
    let mut last_kept: Option<usize> = None;
    for j in 0..m + reach {
        if j < m {
            while deque.back().is_some_and(|&b| abs[b] <= abs[j]) {
                deque.pop_back();
            }
            deque.push_back(j);
        }
        if j < reach {
            continue;
        }
        let i = j - reach;
        while deque.front().is_some_and(|&f| f + reach < i) {
            deque.pop_front();
        }
        let front = *deque.front().expect("window contains i");
        if abs[i] >= abs[front] && last_kept.is_none_or(|k| i - k >= radius) {
            last_kept = Some(i);
            entries.push(Candidate {
                position: profile.domain_start + i,
                score: abs[i],
                bandwidth: h,
            });
        }
    }
    CandidateSet::new(entries)
}

/// Neighbourhood used when screening a profile for candidate change-points.
///
/// `Bandwidth` is the strict h-local rule of [`local_maximizers`].
/// `HalfBandwidth` uses radius `round(h / 2)`: peaks of neighbouring
/// change-points closer than `2h` both survive screening, at the cost of a
/// somewhat larger candidate list for the selection step to prune.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Neighborhood {
    Bandwidth,
    #[default]
    HalfBandwidth,
}

impl Neighborhood {
    pub fn radius(self, h: usize) -> usize {
        match self {
            Neighborhood::Bandwidth => h,
            Neighborhood::HalfBandwidth => h.div_ceil(2).max(1),
        }
    }

    /// Screens `profile` with this neighbourhood.
    pub fn maximizers(self, profile: &DiagnosticProfile) -> CandidateSet {
        local_maximizers_within(profile, self.radius(profile.bandwidth))
    }
}

/// Keeps candidates with `score > lambda`, order preserved.
pub fn threshold_candidates(cands: &CandidateSet, lambda: f64) -> CandidateSet {
    CandidateSet {
        entries: cands
            .entries
            .iter()
            .filter(|c| c.score > lambda)
            .copied()
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> Series {
        Series::new(v.to_vec()).unwrap()
    }

    #[test]
    fn step_of_three() {
        let p = equal_weight_diagnostic(&series(&[0., 0., 0., 1., 1., 1.]), 3).unwrap();
        assert_eq!((p.domain_start(), p.domain_end()), (3, 3));
        assert_eq!(p.at(3), Some(-1.0));
    }

    #[test]
    fn constant_series_is_flat() {
        let s = series(&[2.5; 40]);
        for h in 1..=20 {
            let p = equal_weight_diagnostic(&s, h).unwrap();
            assert_eq!(p.len(), 40 - 2 * h + 1);
            assert!(p.values().iter().all(|d| d.abs() < 1e-12));
        }
        for kernel in [Kernel::Uniform, Kernel::Epanechnikov] {
            let p = local_linear_diagnostic(&s, 5, kernel).unwrap();
            assert!(p.values().iter().all(|d| d.abs() < 1e-12));
        }
    }

    #[test]
    fn bandwidth_errors() {
        let s = series(&[0.0; 10]);
        assert_eq!(
            equal_weight_diagnostic(&s, 0),
            Err(SaraError::BandwidthNonPositive { h: 0, min: 1 })
        );
        assert_eq!(
            equal_weight_diagnostic(&s, 6),
            Err(SaraError::BandwidthTooLarge { h: 6, max: 5 })
        );
        assert!(equal_weight_diagnostic(&s, 5).is_ok());
        assert!(matches!(
            local_linear_diagnostic(&s, 1, Kernel::Uniform),
            Err(SaraError::BandwidthNonPositive { .. })
        ));
    }

    #[test]
    fn local_linear_recovers_slope() {
        let (a, b) = (0.37, -2.0);
        let s = Series::new((1..=50).map(|i| a * i as f64 + b).collect()).unwrap();
        for kernel in [Kernel::Uniform, Kernel::Epanechnikov] {
            for h in [2, 5, 12] {
                let p = local_linear_diagnostic(&s, h, kernel).unwrap();
                for (_, d) in p.iter() {
                    assert!((d - a).abs() < 1e-9, "{kernel:?} h={h}: {d}");
                }
            }
        }
    }

    #[test]
    fn single_jump_maximizer() {
        let mut v = vec![0.0; 10];
        v.extend([1.0; 10]);
        let p = equal_weight_diagnostic(&series(&v), 4).unwrap();
        let c = local_maximizers(&p);
        let nonzero: Vec<_> = c.entries().iter().filter(|c| c.score > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].position, 10);
        assert_eq!(nonzero[0].score, 1.0);
        assert_eq!(c.entries()[0].position, 10);
    }

    #[test]
    fn constant_series_ties_collapse_left() {
        let p = equal_weight_diagnostic(&series(&[1.0; 30]), 4).unwrap();
        let c = local_maximizers(&p);
        let mut pos = c.positions();
        pos.sort_unstable();
        assert_eq!(pos, vec![4, 8, 12, 16, 20, 24]);
        assert!(c.entries().iter().all(|c| c.score == 0.0));
        assert!(threshold_candidates(&c, 0.0).is_empty());
    }

    #[test]
    fn threshold_filters_in_order() {
        let c = CandidateSet::new(
            [(5, 3.1), (20, 1.2), (40, 0.4)]
                .iter()
                .map(|&(position, score)| Candidate {
                    position,
                    score,
                    bandwidth: 3,
                })
                .collect(),
        );
        let t = threshold_candidates(&c, 1.0);
        let scores: Vec<f64> = t.entries().iter().map(|c| c.score).collect();
        assert_eq!(scores, vec![3.1, 1.2]);
        assert_eq!(threshold_candidates(&c, 0.0), c);
    }

    #[test]
    fn profile_tsv_layout() {
        let p = equal_weight_diagnostic(&series(&[0., 0., 1., 1.]), 2).unwrap();
        let mut buf = Vec::new();
        p.write_tsv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "position\tD\n2\t-1\n");
    }

    #[test]
    fn narrower_neighbourhood_keeps_more_peaks() {
        // Irrational-step sawtooth: no ties in |D|.
        let v: Vec<f64> = (0..200)
            .map(|i| ((i as f64) * 0.618_033_988_7).fract())
            .collect();
        let p = equal_weight_diagnostic(&series(&v), 8).unwrap();
        let strict = local_maximizers(&p).positions();
        assert_eq!(Neighborhood::Bandwidth.maximizers(&p).positions(), strict);
        assert_eq!(Neighborhood::HalfBandwidth.radius(8), 4);
        assert_eq!(Neighborhood::HalfBandwidth.radius(9), 5);
        assert_eq!(Neighborhood::HalfBandwidth.radius(1), 1);
        let mut half = Neighborhood::HalfBandwidth.maximizers(&p).positions();
        half.sort_unstable();
        assert!(strict.iter().all(|x| half.contains(x)));
        assert!(half.windows(2).all(|w| w[1] - w[0] >= 4));
        assert!(half.len() >= strict.len());
    }
}
