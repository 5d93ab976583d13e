// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multi-bandwidth detection: pool thresholded candidates from several
//! bandwidths, then refine the pool by subset selection.

use std::collections::BTreeMap;

use crate::diagnostics::{
    equal_weight_diagnostic, threshold_candidates, Candidate, CandidateSet, Neighborhood,
};
use crate::error::{Result, SaraError};
use crate::selection::SegmentationModel;
use crate::selection::{
    backward_stepwise, best_subset, estimate_sigma, refine_subset, InfoCriterion,
};
use crate::series::Series;

/// Pools up to this size are refined by exhaustive subset search.
pub const EXACT_POOL_MAX: usize = 12;

pub const DEFAULT_THRESHOLD_CONSTANT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaSource {
    /// Estimate by [`estimate_sigma`] with the given window half-width.
    Estimated(usize),
    Known(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiBandConfig {
    pub bandwidths: Vec<usize>,
    pub threshold_constant: f64,
    pub criterion: InfoCriterion,
    pub sigma_source: SigmaSource,
    pub neighborhood: Neighborhood,
}

impl MultiBandConfig {
    /// `C = 2`, mBIC, noise estimated at the smallest bandwidth,
    /// half-bandwidth screening.
    pub fn new(bandwidths: Vec<usize>) -> Self {
        let h_min = bandwidths.iter().copied().min().unwrap_or(1);
        Self {
            bandwidths,
            threshold_constant: DEFAULT_THRESHOLD_CONSTANT,
            criterion: InfoCriterion::Mbic,
            sigma_source: SigmaSource::Estimated(h_min),
            neighborhood: Neighborhood::default(),
        }
    }

    /// [`MultiBandConfig::new`] over [`default_bandwidths`].
    pub fn auto(n: usize) -> Result<Self> {
        Ok(Self::new(default_bandwidths(n)?))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.bandwidths.is_empty() {
            return Err(SaraError::InvalidConfig("no bandwidths given".into()));
        }
        let mut seen = self.bandwidths.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(SaraError::InvalidConfig(format!(
                "bandwidths must be distinct: {:?}",
                self.bandwidths
            )));
        }
        for &h in &self.bandwidths {
            if h == 0 {
                return Err(SaraError::BandwidthNonPositive { h, min: 1 });
            }
            if h > n / 2 {
                return Err(SaraError::BandwidthTooLarge { h, max: n / 2 });
            }
        }
        if !(self.threshold_constant.is_finite() && self.threshold_constant > 0.0) {
            return Err(SaraError::InvalidConfig(format!(
                "threshold constant must be positive; got {}",
                self.threshold_constant
            )));
        }
        if let SigmaSource::Known(s) = self.sigma_source {
            if !(s.is_finite() && s >= 0.0) {
                return Err(SaraError::InvalidConfig(format!("invalid sigma {s}")));
            }
        }
        Ok(())
    }

    pub fn sigma(&self, series: &Series) -> f64 {
        match self.sigma_source {
            SigmaSource::Known(s) => s,
            SigmaSource::Estimated(h) => estimate_sigma(series, h),
        }
    }

    /// `lambda_k = C sqrt(2 / h_k) sigma`.
    pub fn threshold(&self, h: usize, sigma: f64) -> f64 {
        self.threshold_constant * (2.0 / h as f64).sqrt() * sigma
    }
}

/// `[round(log n), round(2 log n), round(3 log n)]`, clamped to
/// `[2, n/2]` with duplicates removed.
pub fn default_bandwidths(n: usize) -> Result<Vec<usize>> {
    if n < 8 {
        return Err(SaraError::SeriesTooShort { n, min: 8 });
    }
    let ln = (n as f64).ln();
    let mut out: Vec<usize> = Vec::with_capacity(3);
    for k in 1..=3 {
        let h = ((k as f64 * ln).round() as usize).clamp(2, n / 2);
        if !out.contains(&h) {
            out.push(h);
        }
    }
    Ok(out)
}

/// Union of thresholded local maximizers over all bandwidths, each
/// screened with `cfg.neighborhood`.
///
/// A position found at several bandwidths appears once, with its largest
/// score; distinct positions are never merged however close they are.
pub fn pool_candidates(series: &Series, cfg: &MultiBandConfig) -> Result<CandidateSet> {
    cfg.validate(series.len())?;
    let sigma = cfg.sigma(series);
    let mut by_position: BTreeMap<usize, Candidate> = BTreeMap::new();
    for &h in &cfg.bandwidths {
        let profile = equal_weight_diagnostic(series, h)?;
        let kept = threshold_candidates(
            &cfg.neighborhood.maximizers(&profile),
            cfg.threshold(h, sigma),
        );
        for c in kept.into_entries() {
            by_position
                .entry(c.position)
                .and_modify(|e| {
                    if c.score > e.score {
                        *e = c;
                    }
                })
                .or_insert(c);
        }
    }
    Ok(CandidateSet::new(by_position.into_values().collect()))
}

/// Subset selection over a pool: exhaustive up to [`EXACT_POOL_MAX`]
/// candidates; beyond that, backward stepwise deletion followed by
/// [`refine_subset`], which can only lower the criterion.
pub fn select_from_pool(
    series: &Series,
    pool: &CandidateSet,
    criterion: InfoCriterion,
) -> Result<SegmentationModel> {
    if pool.len() <= EXACT_POOL_MAX {
        best_subset(series, pool, criterion)
    } else {
        let start = backward_stepwise(series, pool, criterion)?;
        refine_subset(series, pool, criterion, &start.changepoints)
    }
}

pub fn msara_detect(series: &Series, cfg: &MultiBandConfig) -> Result<SegmentationModel> {
    let pool = pool_candidates(series, cfg)?;
    select_from_pool(series, &pool, cfg.criterion)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bandwidth_examples() {
        assert_eq!(default_bandwidths(1000).unwrap(), vec![7, 14, 21]);
        assert_eq!(default_bandwidths(497).unwrap(), vec![6, 12, 19]);
        let small = default_bandwidths(8).unwrap();
        assert!(small.iter().all(|&h| (2..=4).contains(&h)));
        let mut dedup = small.clone();
        dedup.dedup();
        assert_eq!(small, dedup);
        assert_eq!(small, vec![2, 4]);
        assert!(matches!(
            default_bandwidths(7),
            Err(SaraError::SeriesTooShort { n: 7, min: 8 })
        ));
    }

    #[test]
    fn config_validation() {
        let n = 100;
        assert!(MultiBandConfig::new(vec![5, 10]).validate(n).is_ok());
        assert!(MultiBandConfig::new(vec![]).validate(n).is_err());
        assert!(MultiBandConfig::new(vec![5, 5]).validate(n).is_err());
        assert!(MultiBandConfig::new(vec![51]).validate(n).is_err());
        let mut cfg = MultiBandConfig::new(vec![5]);
        cfg.threshold_constant = 0.0;
        assert!(cfg.validate(n).is_err());
    }

    #[test]
    fn empty_pool_gives_null_model() {
        let s = Series::new(vec![0.0; 50]).unwrap();
        let m = msara_detect(&s, &MultiBandConfig::new(vec![3, 6])).unwrap();
        assert!(m.changepoints.is_empty());
    }

    #[test]
    fn noiseless_pool_covers_truth() {
        let mut v = vec![0.0; 40];
        v.extend([1.0; 40]);
        v.extend([-0.5; 40]);
        let s = Series::new(v).unwrap();
        let mut cfg = MultiBandConfig::new(vec![5, 10, 15]);
        cfg.sigma_source = SigmaSource::Known(0.1);
        let pool = pool_candidates(&s, &cfg).unwrap();
        let pos = pool.positions();
        assert!(pos.contains(&40) && pos.contains(&80));
        assert_eq!(msara_detect(&s, &cfg).unwrap().changepoints, vec![40, 80]);
    }
}
