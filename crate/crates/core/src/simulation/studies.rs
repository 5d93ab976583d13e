// SPDX-License-Identifier: MIT OR Apache-2.0

use rand::Rng;
use rayon::prelude::*;

use super::metrics::{summarize, ReplicateOutcome, StudyReport};
use super::{gaussian_noise, generate, lr_statistic, mix_seed, rng_for, theorem1_bound, TruthSpec};
use crate::diagnostics::{equal_weight_diagnostic, Neighborhood};
use crate::error::{Result, SaraError};
use crate::multibandwidth::{MultiBandConfig, SigmaSource};
use crate::pipeline::sara_threshold;
use crate::selection::{InfoCriterion, SegmentationModel};
use crate::series::Series;

/// `(n, L)` settings of the short-segment coverage design.
pub const DEFAULT_COVERAGE_PAIRS: [(usize, usize); 4] =
    [(400, 12), (3000, 16), (20000, 20), (160000, 24)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyOptions {
    pub reps: usize,
    pub seed: u64,
    /// Strict radius for coverage: an estimate covers `tau` if `|e - tau| < radius`.
    pub radius: usize,
    /// Inclusive tolerance for detection and false discoveries.
    pub tol: usize,
}

impl StudyOptions {
    pub fn new(reps: usize, seed: u64, radius: usize) -> Self {
        Self {
            reps,
            seed,
            radius,
            tol: 5,
        }
    }
}

/// Runs `detector` on `opts.reps` independent draws of `template`.
///
/// Replicate `i` uses seed `mix_seed(opts.seed, i)`; results do not depend
/// on thread scheduling.
pub fn changepoint_study<F>(
    template: &TruthSpec,
    opts: StudyOptions,
    detector: F,
) -> Result<StudyReport>
where
    F: Fn(&Series) -> Result<SegmentationModel> + Sync,
{
    template.validate()?;
    if opts.reps == 0 {
        return Err(SaraError::InvalidSpec(
            "at least one replicate is required".into(),
        ));
    }
    let outcomes = (0..opts.reps as u64)
        .into_par_iter()
        .map(|i| {
            let spec = template.clone().with_seed(mix_seed(opts.seed, i));
            let series = generate(&spec)?;
            let model = detector(&series)?;
            Ok(ReplicateOutcome::score(
                &spec.changepoints,
                &model.changepoints,
                opts.radius,
                opts.tol,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(template.changepoints.len(), &outcomes))
}

/// `round(3L/4)` with ties to even, at least 1.
pub fn coverage_bandwidth(len: usize) -> usize {
    ((3.0 * len as f64 / 4.0).round_ties_even() as usize).max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageRow {
    pub n: usize,
    pub len: usize,
    pub sigma: f64,
    pub h: usize,
    pub lambda: f64,
    pub report: StudyReport,
}

/// Thresholded SaRa with `h = round(3L/4)`, `lambda = 3 delta / 4` on a
/// short raised segment of length `L` in the middle of `n` points.
pub fn sure_coverage_study(
    pairs: &[(usize, usize)],
    delta: f64,
    sigmas: &[f64],
    reps: usize,
    seed: u64,
) -> Result<Vec<CoverageRow>> {
    let mut rows = Vec::new();
    for &(n, len) in pairs {
        for &sigma in sigmas {
            let config_seed = mix_seed(seed, rows.len() as u64);
            let h = coverage_bandwidth(len);
            let lambda = 0.75 * delta;
            let template = TruthSpec::short_segment(n, len, delta, sigma);
            let report =
                changepoint_study(&template, StudyOptions::new(reps, config_seed, h), |s| {
                    sara_threshold(s, h, lambda)
                })?;
            rows.push(CoverageRow {
                n,
                len,
                sigma,
                h,
                lambda,
                report,
            });
        }
    }
    Ok(rows)
}

/// `(n, L, sigma)` settings for the finite-sample bound check, each with
/// `S^2 > 32 log n` at `delta = 1`.
pub const THEOREM1_SETTINGS: [(usize, usize, f64); 3] =
    [(400, 12, 0.245), (1000, 16, 0.258), (2000, 20, 0.277)];

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub len: usize,
    pub sigma: f64,
    pub h: usize,
    pub lambda: f64,
    pub bound: f64,
    /// Fraction of replicates with exactly the true count, each within `h`.
    pub empirical: f64,
}

/// Thresholded SaRa with `h = L/2`, `lambda = delta/2` on the short-segment
/// design, against [`theorem1_bound`].
pub fn theorem1_study(
    settings: &[(usize, usize, f64)],
    delta: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<BoundRow>> {
    settings
        .iter()
        .enumerate()
        .map(|(k, &(n, len, sigma))| {
            let (h, lambda) = ((len / 2).max(1), delta / 2.0);
            let template = TruthSpec::short_segment(n, len, delta, sigma);
            let report = changepoint_study(
                &template,
                StudyOptions::new(reps, mix_seed(seed, k as u64), h),
                |s| sara_threshold(s, h, lambda),
            )?;
            Ok(BoundRow {
                n,
                len,
                sigma,
                h,
                lambda,
                bound: theorem1_bound(delta, template.min_spacing(), sigma, n),
                empirical: report.sure_coverage,
            })
        })
        .collect()
}

/// Bandwidths 9, 15, 21 with `C = 2`, mBIC and noise estimated at h = 9.
pub fn simulation3_msara_config() -> MultiBandConfig {
    MultiBandConfig {
        bandwidths: vec![9, 15, 21],
        threshold_constant: 2.0,
        criterion: InfoCriterion::Mbic,
        sigma_source: SigmaSource::Estimated(9),
        neighborhood: Neighborhood::HalfBandwidth,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerTest {
    LikelihoodRatio,
    /// `max_x |D(x, h)|` over the full-window domain.
    Sara(usize),
}

impl PowerTest {
    pub fn name(&self) -> String {
        match self {
            PowerTest::LikelihoodRatio => "lr".into(),
            PowerTest::Sara(h) => format!("sara_h{h}"),
        }
    }

    pub fn statistic(&self, series: &Series) -> Result<f64> {
        match *self {
            PowerTest::LikelihoodRatio => Ok(lr_statistic(series)),
            PowerTest::Sara(h) => Ok(equal_weight_diagnostic(series, h)?.max_abs()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Fixed(usize),
    /// Drawn per replicate from `{h+1, ..., n-h-1}`, `h` the largest bandwidth.
    Uniform,
}

impl Location {
    pub fn name(&self) -> String {
        match self {
            Location::Fixed(j) => j.to_string(),
            Location::Uniform => "uniform".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerPoint {
    pub jsr: f64,
    pub test: PowerTest,
    pub location: Location,
    pub alpha: f64,
    pub critical_value: f64,
    pub power: f64,
}

/// Single change-point power comparison with known unit noise variance,
/// so the jump size equals the jump-to-noise ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerConfig {
    pub n: usize,
    pub jsr_grid: Vec<f64>,
    pub locations: Vec<Location>,
    pub alphas: Vec<f64>,
    pub bandwidths: Vec<usize>,
    pub calibration_reps: usize,
    pub reps: usize,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            n: 100,
            jsr_grid: vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5],
            locations: vec![
                Location::Fixed(10),
                Location::Fixed(30),
                Location::Fixed(50),
                Location::Uniform,
            ],
            alphas: vec![0.05, 0.01],
            bandwidths: vec![10, 15],
            calibration_reps: 10_000,
            reps: 10_000,
            seed: 1,
        }
    }
}

impl PowerConfig {
    pub fn tests(&self) -> Vec<PowerTest> {
        std::iter::once(PowerTest::LikelihoodRatio)
            .chain(self.bandwidths.iter().map(|&h| PowerTest::Sara(h)))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(SaraError::InvalidSpec(m));
        let h_max = self.bandwidths.iter().copied().max().unwrap_or(0);
        if self.bandwidths.contains(&0) || 2 * h_max > self.n || self.n < 2 {
            return fail(format!(
                "bandwidths {:?} do not fit n = {}",
                self.bandwidths, self.n
            ));
        }
        if self.reps == 0 || self.calibration_reps == 0 {
            return fail("replicate counts must be positive".into());
        }
        if self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return fail(format!("alphas {:?} must lie in (0, 1)", self.alphas));
        }
        if self.jsr_grid.iter().any(|j| !j.is_finite() || *j < 0.0) {
            return fail("jump-to-noise ratios must be finite and non-negative".into());
        }
        for loc in &self.locations {
            match *loc {
                Location::Fixed(j) if j == 0 || j >= self.n => {
                    return fail(format!("location {j} outside (0, {})", self.n));
                }
                Location::Uniform if self.n < 2 * h_max + 3 => {
                    return fail("no room for uniform locations".into());
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// `(1 - alpha)` empirical quantile of sorted null statistics.
fn critical_value(sorted: &[f64], alpha: f64) -> f64 {
    let r = sorted.len();
    let k = ((1.0 - alpha) * r as f64).ceil() as usize;
    sorted[k.clamp(1, r) - 1]
}

/// Calibrates each test's critical value under the null by Monte Carlo,
/// then estimates rejection rates over the jump-size grid.
///
/// Noise for replicate `r` at a given location is shared across jump sizes
/// and tests.
pub fn power_study(cfg: &PowerConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let tests = cfg.tests();
    let n = cfg.n;
    let h_max = cfg.bandwidths.iter().copied().max().unwrap_or(1);

    let calib_seed = mix_seed(cfg.seed, u64::MAX);
    let null_stats: Vec<Vec<f64>> = (0..cfg.calibration_reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(mix_seed(calib_seed, i));
            let s = Series::new(gaussian_noise(&mut rng, n, 1.0))?;
            tests.iter().map(|t| t.statistic(&s)).collect()
        })
        .collect::<Result<_>>()?;
    let mut sorted_by_test: Vec<Vec<f64>> = (0..tests.len())
        .map(|t| null_stats.iter().map(|row| row[t]).collect())
        .collect();
    for v in &mut sorted_by_test {
        v.sort_by(f64::total_cmp);
    }
    let crit: Vec<Vec<f64>> = cfg
        .alphas
        .iter()
        .map(|&a| {
            sorted_by_test
                .iter()
                .map(|v| critical_value(v, a))
                .collect()
        })
        .collect();

    let mut power = Vec::new();
    for (li, &loc) in cfg.locations.iter().enumerate() {
        let loc_seed = mix_seed(cfg.seed, li as u64);
        // rejections[jsr][alpha][test]
        let rejections = (0..cfg.reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_for(mix_seed(loc_seed, r));
                let tau = match loc {
                    Location::Fixed(j) => j,
                    Location::Uniform => rng.random_range(h_max + 1..n - h_max),
                };
                let noise = gaussian_noise(&mut rng, n, 1.0);
                let mut counts =
                    vec![vec![vec![0usize; tests.len()]; cfg.alphas.len()]; cfg.jsr_grid.len()];
                for (gi, &jsr) in cfg.jsr_grid.iter().enumerate() {
                    let y: Vec<f64> = noise
                        .iter()
                        .enumerate()
                        .map(|(i, e)| if i >= tau { e + jsr } else { *e })
                        .collect();
                    let s = Series::new(y)?;
                    for (ti, t) in tests.iter().enumerate() {
                        let stat = t.statistic(&s)?;
                        for ai in 0..cfg.alphas.len() {
                            if stat > crit[ai][ti] {
                                counts[gi][ai][ti] += 1;
                            }
                        }
                    }
                }
                Ok(counts)
            })
            .try_reduce(
                || vec![vec![vec![0usize; tests.len()]; cfg.alphas.len()]; cfg.jsr_grid.len()],
                |mut a, b| {
                    for (ga, gb) in a.iter_mut().zip(&b) {
                        for (aa, ab) in ga.iter_mut().zip(gb) {
                            for (x, y) in aa.iter_mut().zip(ab) {
                                *x += y;
                            }
                        }
                    }
                    Ok(a)
                },
            )?;
        for (gi, &jsr) in cfg.jsr_grid.iter().enumerate() {
            for (ai, &alpha) in cfg.alphas.iter().enumerate() {
                for (ti, &test) in tests.iter().enumerate() {
                    power.push(PowerPoint {
                        jsr,
                        test,
                        location: loc,
                        alpha,
                        critical_value: crit[ai][ti],
                        power: rejections[gi][ai][ti] as f64 / cfg.reps as f64,
                    });
                }
            }
        }
    }

    Ok(StudyReport {
        replicate_count: cfg.reps,
        power,
        ..StudyReport::default()
    })
}
