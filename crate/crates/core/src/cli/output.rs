// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::{self, Write};

use crate::selection::SegmentationModel;
use crate::series::Series;

pub const SEGMENT_HEADER: &str = "label\tstart\tend\tmean";

/// One row per segment with 1-based inclusive bounds, translated to
/// genomic positions when the series carries them.
pub fn write_segments<W: Write>(
    results: &[(Series, SegmentationModel)],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "{SEGMENT_HEADER}")?;
    for (k, (series, model)) in results.iter().enumerate() {
        let label = series
            .label()
            .map_or_else(|| format!("series{}", k + 1), str::to_string);
        for (start, end, mean) in model.segments(series.len()) {
            let (s, e) = match series.positions() {
                Some(p) => (p[start - 1], p[end - 1]),
                None => (start as u64, end as u64),
            };
            writeln!(out, "{label}\t{s}\t{e}\t{mean}")?;
        }
    }
    Ok(())
}
