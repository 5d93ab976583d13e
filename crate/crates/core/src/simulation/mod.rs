// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic designs, the likelihood-ratio comparator and Monte-Carlo
//! studies of detection accuracy and power.
//!
//! Every replicate draws from its own ChaCha8 stream derived from
//! `(master seed, replicate index)`, so serial and parallel runs agree.
//! Gaussian noise uses the ziggurat sampler of `rand_distr`.

mod metrics;
mod report;
mod studies;

pub use metrics::{detection_metrics, Coverage, DetectionOutcome, StudyReport};
pub use report::{
    write_coverage_table, write_detection_table, write_model_size_table, write_power_tsv,
};
pub use studies::{
    changepoint_study, coverage_bandwidth, power_study, simulation3_msara_config,
    sure_coverage_study, theorem1_study, BoundRow, CoverageRow, Location, PowerConfig, PowerPoint,
    PowerTest, StudyOptions, DEFAULT_COVERAGE_PAIRS, THEOREM1_SETTINGS,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SaraError};
use crate::series::Series;

/// Change-point positions of the six-change design with 497 markers.
pub const SIM3_CHANGEPOINTS: [usize; 6] = [137, 224, 241, 298, 307, 331];
pub const SIM3_JUMPS: [f64; 6] = [0.26, 0.99, -1.6, 0.69, -0.85, 0.53];
pub const SIM3_BASELINE: f64 = -0.18;
pub const SIM3_N: usize = 497;
pub const SIM3_TREND_AMP: f64 = 0.25;
/// Trend frequencies for the long and short sinusoidal trends.
pub const SIM3_LONG_TREND: f64 = 0.01;
pub const SIM3_SHORT_TREND: f64 = 0.025;

/// Ground truth for one synthetic series.
///
/// The mean is `baseline + sum_{tau_j < i} delta_j`, plus
/// `trend_amp * sigma * sin(trend_freq * pi * i)` when `trend_amp > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruthSpec {
    pub n: usize,
    pub changepoints: Vec<usize>,
    pub jump_sizes: Vec<f64>,
    pub baseline: f64,
    pub sigma: f64,
    pub trend_amp: f64,
    pub trend_freq: f64,
    pub seed: u64,
}

impl TruthSpec {
    pub fn step(n: usize, changepoints: Vec<usize>, jump_sizes: Vec<f64>, sigma: f64) -> Self {
        Self {
            n,
            changepoints,
            jump_sizes,
            baseline: 0.0,
            sigma,
            trend_amp: 0.0,
            trend_freq: 0.0,
            seed: 0,
        }
    }

    /// A bump of height `delta` over `(n/2, n/2 + len]`.
    pub fn short_segment(n: usize, len: usize, delta: f64, sigma: f64) -> Self {
        Self::step(n, vec![n / 2, n / 2 + len], vec![delta, -delta], sigma)
    }

    /// The six-change design; `trend_freq = 0` disables the trend.
    pub fn simulation3(sigma: f64, trend_freq: f64) -> Self {
        Self {
            n: SIM3_N,
            changepoints: SIM3_CHANGEPOINTS.to_vec(),
            jump_sizes: SIM3_JUMPS.to_vec(),
            baseline: SIM3_BASELINE,
            sigma,
            trend_amp: if trend_freq > 0.0 {
                SIM3_TREND_AMP
            } else {
                0.0
            },
            trend_freq,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(SaraError::InvalidSpec(m));
        if self.n < Series::MIN_LEN {
            return fail(format!("n = {} is too short", self.n));
        }
        if self.changepoints.len() != self.jump_sizes.len() {
            return fail(format!(
                "{} change-points but {} jump sizes",
                self.changepoints.len(),
                self.jump_sizes.len()
            ));
        }
        if crate::selection::validate_changepoints(&self.changepoints, self.n).is_err() {
            return fail(format!(
                "change-points {:?} must be strictly increasing in (0, {})",
                self.changepoints, self.n
            ));
        }
        let finite = [self.baseline, self.sigma, self.trend_amp, self.trend_freq]
            .iter()
            .chain(&self.jump_sizes)
            .all(|v| v.is_finite());
        if !finite || self.sigma < 0.0 || self.trend_amp < 0.0 || self.trend_freq < 0.0 {
            return fail("parameters must be finite; sigma and trend non-negative".into());
        }
        Ok(())
    }

    /// Noise-free mean `mu_i` (without trend), 0-based.
    pub fn mean(&self) -> Vec<f64> {
        let mut mu = Vec::with_capacity(self.n);
        let mut level = self.baseline;
        let mut next = 0;
        for i in 1..=self.n {
            // tau closes a segment: the jump applies from tau + 1 on.
            while next < self.changepoints.len() && self.changepoints[next] < i {
                level += self.jump_sizes[next];
                next += 1;
            }
            mu.push(level);
        }
        mu
    }

    /// Minimum absolute jump size.
    pub fn min_jump(&self) -> f64 {
        self.jump_sizes
            .iter()
            .fold(f64::INFINITY, |m, d| m.min(d.abs()))
    }

    /// Minimum segment length, end segments included.
    pub fn min_spacing(&self) -> usize {
        let mut prev = 0;
        let mut min = usize::MAX;
        for &c in self.changepoints.iter().chain(std::iter::once(&self.n)) {
            min = min.min(c - prev);
            prev = c;
        }
        min
    }
}

/// SplitMix64 finalizer; spreads nearby seeds over the whole range.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_noise(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sigma * z
        })
        .collect()
}

/// Draws `Y_i = mu_i + trend_i + eps_i` with `eps ~ N(0, sigma^2)`.
pub fn generate(spec: &TruthSpec) -> Result<Series> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed);
    let noise = gaussian_noise(&mut rng, spec.n, spec.sigma);
    let trend_scale = spec.trend_amp * spec.sigma;
    let values = spec
        .mean()
        .into_iter()
        .zip(noise)
        .enumerate()
        .map(|(i, (mu, eps))| {
            let trend = if spec.trend_amp > 0.0 {
                trend_scale * (spec.trend_freq * std::f64::consts::PI * (i + 1) as f64).sin()
            } else {
                0.0
            };
            mu + trend + eps
        })
        .collect();
    Series::new(values)
}

/// `T_n = max_j (j S_n / n - S_j)^2 / (j (1 - j/n))` over `1 <= j < n`.
pub fn lr_statistic(series: &Series) -> f64 {
    let y = series.values();
    let n = y.len();
    let nf = n as f64;
    let total: f64 = y.iter().sum();
    let mut partial = 0.0;
    let mut best = 0.0_f64;
    for (j, v) in y[..n - 1].iter().enumerate() {
        partial += v;
        let jf = (j + 1) as f64;
        let dev = jf * total / nf - partial;
        best = best.max(dev * dev / (jf * (1.0 - jf / nf)));
    }
    best
}

/// Lower bound `1 - 8 S^-1 exp(log n - S^2/32)` on the probability that
/// thresholding with `h = L/2`, `lambda = delta/2` finds exactly the true
/// change-points within `h`, where `S^2 = delta^2 L / sigma^2`.
///
/// Returns 0 when `S^2 < 32 log n`.
pub fn theorem1_bound(delta: f64, min_spacing: usize, sigma: f64, n: usize) -> f64 {
    let s2 = delta * delta * min_spacing as f64 / (sigma * sigma);
    let ln_n = (n as f64).ln();
    if !s2.is_finite() || s2 < 32.0 * ln_n {
        return if s2 == f64::INFINITY { 1.0 } else { 0.0 };
    }
    (1.0 - 8.0 / s2.sqrt() * (ln_n - s2 / 32.0).exp()).max(0.0)
}
