// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reads `label<TAB>position<TAB>value` tables into one series per label.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::series::Series;

pub const INPUT_HEADER: &str = "label\tposition\tvalue";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: value is missing or not finite")]
    NonFiniteValue { line: usize },
    #[error("label {label:?} has fewer than two observations")]
    EmptyGroup { label: String },
    #[error("line {line}: duplicate position {position} for label {label:?}")]
    DuplicatePosition {
        line: usize,
        label: String,
        position: u64,
    },
    #[error("input contains no data rows")]
    NoData,
}

const MISSING: [&str; 5] = ["", "na", "nan", "null", "none"];

fn parse_value(token: &str, line: usize) -> Result<f64, IngestError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(IngestError::NonFiniteValue { line }),
        Err(_) if MISSING.contains(&token.to_ascii_lowercase().as_str()) => {
            Err(IngestError::NonFiniteValue { line })
        }
        Err(e) => Err(IngestError::Parse {
            line,
            message: format!("bad value {token:?}: {e}"),
        }),
    }
}

/// Parses table text. Line numbers in errors are 1-based, header included.
pub fn parse_table(text: &str) -> Result<Vec<Series>, IngestError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == INPUT_HEADER => {}
        Some((_, h)) => {
            return Err(IngestError::Parse {
                line: 1,
                message: format!("expected header {INPUT_HEADER:?}, found {h:?}"),
            })
        }
        None => return Err(IngestError::NoData),
    }

    // label -> (position, value, line)
    let mut groups: BTreeMap<String, Vec<(u64, f64, usize)>> = BTreeMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 3 {
            return Err(IngestError::Parse {
                line,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let position = fields[1]
            .trim()
            .parse::<u64>()
            .map_err(|e| IngestError::Parse {
                line,
                message: format!("bad position {:?}: {e}", fields[1]),
            })?;
        let value = parse_value(fields[2].trim(), line)?;
        groups
            .entry(fields[0].to_string())
            .or_default()
            .push((position, value, line));
    }
    if groups.is_empty() {
        return Err(IngestError::NoData);
    }

    groups
        .into_iter()
        .map(|(label, mut rows)| {
            rows.sort_by_key(|r| r.0);
            if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(IngestError::DuplicatePosition {
                    line: w[0].2.max(w[1].2),
                    label,
                    position: w[0].0,
                });
            }
            if rows.len() < Series::MIN_LEN {
                return Err(IngestError::EmptyGroup { label });
            }
            let positions = rows.iter().map(|r| r.0).collect();
            let values = rows.iter().map(|r| r.1).collect();
            let series = Series::new(values)
                .and_then(|s| s.with_positions(positions))
                .expect("validated rows form a series");
            Ok(series.with_label(label))
        })
        .collect()
}

pub fn ingest(path: &Path) -> Result<Vec<Series>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_table(&text)
}

/// Writes series in the input layout. Unlabelled series are written as
/// `series<k>`; missing positions fall back to 1-based indices.
pub fn write_series_tsv<W: Write>(series: &[Series], mut out: W) -> io::Result<()> {
    writeln!(out, "{INPUT_HEADER}")?;
    for (k, s) in series.iter().enumerate() {
        let label = s
            .label()
            .map_or_else(|| format!("series{}", k + 1), str::to_string);
        for (i, v) in s.values().iter().enumerate() {
            let pos = s.positions().map_or(i as u64 + 1, |p| p[i]);
            writeln!(out, "{label}\t{pos}\t{v}")?;
        }
    }
    Ok(())
}
