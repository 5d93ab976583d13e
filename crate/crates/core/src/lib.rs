// SPDX-License-Identifier: MIT OR Apache-2.0

//! Screening and ranking (SaRa) change-point detection.
//!
//! The detector scores every position with a local diagnostic `D(x, h)`
//! contrasting the observations just left and right of it, keeps the
//! h-local maximizers of `|D|`, and selects among them by a threshold or
//! by a BIC-type criterion. The multi-bandwidth variant pools candidates
//! from several bandwidths and refines them by subset selection.

#![forbid(unsafe_code)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod multibandwidth;
pub mod pipeline;
pub mod selection;
pub mod series;
pub mod simulation;

pub use diagnostics::{
    equal_weight_diagnostic, local_linear_diagnostic, local_maximizers, local_maximizers_within,
    threshold_candidates, Candidate, CandidateSet, DiagnosticProfile, Kernel, Neighborhood,
    WeightScheme,
};
pub use error::{Result, SaraError};
pub use selection::{InfoCriterion, ModelCriterion, SegmentationModel};
pub use series::Series;
