// SPDX-License-Identifier: MIT OR Apache-2.0

/// Count, mean and within-segment sum of squares of one segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct SegStats {
    pub len: usize,
    pub mean: f64,
    pub rss: f64,
}

impl SegStats {
    /// Two-pass statistics of a non-empty slice.
    pub fn of(y: &[f64]) -> Self {
        debug_assert!(!y.is_empty());
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let rss = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        Self {
            len: y.len(),
            mean,
            rss,
        }
    }

    /// Increase in RSS caused by pooling two adjacent segments.
    pub fn merge_cost(&self, other: &Self) -> f64 {
        let (na, nb) = (self.len as f64, other.len as f64);
        let delta = other.mean - self.mean;
        delta * delta * na * nb / (na + nb)
    }

    pub fn merge(&self, other: &Self) -> Self {
        let (na, nb) = (self.len as f64, other.len as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        Self {
            len: self.len + other.len,
            mean: self.mean + delta * nb / n,
            rss: self.rss + other.rss + delta * delta * na * nb / n,
        }
    }
}
