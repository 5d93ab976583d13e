// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::error::{Result, SaraError};

/// An observed sequence `Y_1..Y_n`, optionally tied to genomic coordinates.
///
/// Indices in the public API are 1-based to match the usual change-point
/// convention: a change-point `tau` means the mean shifts between `Y_tau`
/// and `Y_{tau+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    positions: Option<Vec<u64>>,
    label: Option<String>,
}

impl Series {
    pub const MIN_LEN: usize = 2;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_LEN {
            return Err(SaraError::SeriesTooShort {
                n: values.len(),
                min: Self::MIN_LEN,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SaraError::NonFiniteValue { index });
        }
        Ok(Self {
            values,
            positions: None,
            label: None,
        })
    }

    pub fn with_positions(mut self, positions: Vec<u64>) -> Result<Self> {
        if positions.len() != self.values.len() {
            return Err(SaraError::LengthMismatch {
                values: self.values.len(),
                positions: positions.len(),
            });
        }
        if let Some(i) = positions.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SaraError::PositionsNotIncreasing { index: i + 1 });
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a `Series` holds at least two observations.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn positions(&self) -> Option<&[u64]> {
        self.positions.as_deref()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Largest admissible bandwidth, `floor(n/2)`.
    pub fn max_bandwidth(&self) -> usize {
        self.values.len() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_non_finite() {
        assert!(matches!(
            Series::new(vec![1.0]),
            Err(SaraError::SeriesTooShort { n: 1, .. })
        ));
        assert_eq!(
            Series::new(vec![1.0, f64::NAN, 2.0]),
            Err(SaraError::NonFiniteValue { index: 1 })
        );
        assert_eq!(
            Series::new(vec![1.0, f64::INFINITY]),
            Err(SaraError::NonFiniteValue { index: 1 })
        );
    }

    #[test]
    fn positions_must_increase() {
        let s = Series::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(s.clone().with_positions(vec![10, 20, 30]).is_ok());
        assert_eq!(
            s.clone().with_positions(vec![10, 10, 30]),
            Err(SaraError::PositionsNotIncreasing { index: 1 })
        );
        assert!(matches!(
            s.with_positions(vec![1, 2]),
            Err(SaraError::LengthMismatch { .. })
        ));
    }
}
