// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised by the detection, selection and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SaraError {
    #[error("series must contain at least {min} observations; got {n}")]
    SeriesTooShort { n: usize, min: usize },
    #[error("series of length {n} exceeds the limit of {max} for this operation")]
    SeriesTooLong { n: usize, max: usize },
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("positions must be strictly increasing; violated at index {index}")]
    PositionsNotIncreasing { index: usize },
    #[error("positions length {positions} does not match values length {values}")]
    LengthMismatch { values: usize, positions: usize },
    #[error("bandwidth must be at least {min}; got {h}")]
    BandwidthNonPositive { h: usize, min: usize },
    #[error("bandwidth {h} exceeds floor(n/2) = {max}")]
    BandwidthTooLarge { h: usize, max: usize },
    #[error("local linear design is degenerate at position {x}")]
    DegenerateDesign { x: usize },
    #[error("invalid change-points: {0}")]
    InvalidChangepoints(String),
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = SaraError> = std::result::Result<T, E>;
