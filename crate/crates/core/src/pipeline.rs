// SPDX-License-Identifier: MIT OR Apache-2.0

//! Single-bandwidth detection: screen with `D(x, h)`, then rank.

use crate::diagnostics::{
    equal_weight_diagnostic, local_maximizers, threshold_candidates, Neighborhood,
};
use crate::error::Result;
use crate::selection::{
    default_jmax, fit_segments, rank_select, InfoCriterion, ModelCriterion, SegmentationModel,
};
use crate::series::Series;

/// Change-points are the h-local maximizers with `|D| > lambda`.
pub fn sara_threshold(series: &Series, h: usize, lambda: f64) -> Result<SegmentationModel> {
    let profile = equal_weight_diagnostic(series, h)?;
    let mut cps = threshold_candidates(&local_maximizers(&profile), lambda).positions();
    cps.sort_unstable();
    let mut model = fit_segments(series, &cps)?;
    model.criterion = ModelCriterion::Threshold;
    model.score = lambda;
    Ok(model)
}

/// Change-points are the top-ranked local maximizers of `|D|` (screened
/// with `neighborhood`), with the count chosen by `criterion`. `jmax`
/// defaults to [`default_jmax`].
pub fn sara_rank(
    series: &Series,
    h: usize,
    criterion: InfoCriterion,
    jmax: Option<usize>,
    neighborhood: Neighborhood,
) -> Result<SegmentationModel> {
    let profile = equal_weight_diagnostic(series, h)?;
    let cands = neighborhood.maximizers(&profile);
    let jmax = jmax.unwrap_or_else(|| default_jmax(series.len(), cands.len(), h));
    rank_select(series, &cands, criterion, jmax)
}
