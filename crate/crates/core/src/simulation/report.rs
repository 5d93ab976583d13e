// SPDX-License-Identifier: MIT OR Apache-2.0

//! Tab-separated study tables.

use std::io::{self, Write};

use super::metrics::StudyReport;
use super::studies::CoverageRow;

/// Model-size distribution, per-change-point coverage and mean error.
pub fn write_coverage_table<W: Write>(rows: &[CoverageRow], mut out: W) -> io::Result<()> {
    let num_true = rows.first().map_or(2, |r| r.report.num_true);
    write!(
        out,
        "n\tL\tsigma\th\tlambda\treps\tjhat_eq\tjhat_lt\tjhat_gt\tjhat_mean"
    )?;
    for j in 1..=num_true {
        write!(out, "\tcp{j}_scp\tcp{j}_mean_err")?;
    }
    writeln!(out, "\tsure_coverage")?;
    for row in rows {
        let r = &row.report;
        let k = r.num_true;
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            row.n,
            row.len,
            row.sigma,
            row.h,
            row.lambda,
            r.replicate_count,
            r.fraction_jhat(|j| j == k),
            r.fraction_jhat(|j| j < k),
            r.fraction_jhat(|j| j > k),
            r.mean_jhat(),
        )?;
        for c in &r.scp_per_cp {
            write!(out, "\t{}\t{}", c.fraction, c.mean_error)?;
        }
        writeln!(out, "\t{}", r.sure_coverage)?;
    }
    Ok(())
}

/// Counts of `J_hat` in the buckets `<= J-1`, `J`, `J+1`, `J+2`, `> J+2`.
pub fn write_model_size_table<W: Write>(
    rows: &[(String, StudyReport)],
    mut out: W,
) -> io::Result<()> {
    let k = rows.first().map_or(0, |(_, r)| r.num_true);
    writeln!(
        out,
        "method\tjhat_le_{}\tjhat_{}\tjhat_{}\tjhat_{}\tjhat_gt_{}",
        k.saturating_sub(1),
        k,
        k + 1,
        k + 2,
        k + 2
    )?;
    for (name, r) in rows {
        let count = |pred: &dyn Fn(usize) -> bool| -> usize {
            r.jhat_histogram
                .iter()
                .filter(|(&j, _)| pred(j))
                .map(|(_, &c)| c)
                .sum()
        };
        writeln!(
            out,
            "{name}\t{}\t{}\t{}\t{}\t{}",
            count(&|j| j < k),
            count(&|j| j == k),
            count(&|j| j == k + 1),
            count(&|j| j == k + 2),
            count(&|j| j > k + 2),
        )?;
    }
    Ok(())
}

/// Per-change-point detection rates and the average false-discovery count.
pub fn write_detection_table<W: Write>(
    rows: &[(String, StudyReport)],
    mut out: W,
) -> io::Result<()> {
    let k = rows.first().map_or(0, |(_, r)| r.num_true);
    write!(out, "method")?;
    for j in 1..=k {
        write!(out, "\tcp{j}")?;
    }
    writeln!(out, "\tafd")?;
    for (name, r) in rows {
        write!(out, "{name}")?;
        for d in &r.detection_rate_per_cp {
            write!(out, "\t{d}")?;
        }
        writeln!(out, "\t{}", r.afd)?;
    }
    Ok(())
}

pub fn write_power_tsv<W: Write>(report: &StudyReport, mut out: W) -> io::Result<()> {
    writeln!(out, "jsr\ttest\tlocation\talpha\tpower")?;
    for p in &report.power {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            p.jsr,
            p.test.name(),
            p.location.name(),
            p.alpha,
            p.power
        )?;
    }
    Ok(())
}
