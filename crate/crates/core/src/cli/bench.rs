// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::{self, Write};
use std::time::Instant;

use crate::diagnostics::Neighborhood;
use crate::error::Result;
use crate::pipeline::sara_rank;
use crate::selection::InfoCriterion;
use crate::series::Series;
use crate::simulation::{gaussian_noise, mix_seed, rng_for};

/// Median wall-clock seconds of screening plus ranking (diagnostic, local
/// maximizers, ranked mBIC path) on Gaussian noise, per series length.
///
/// The bandwidth is `round(log n)`. Repetitions are interleaved across
/// lengths so that background load drifts affect every length alike.
pub fn screen_rank_timing(n_grid: &[usize], reps: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    let inputs: Vec<(Series, usize)> = n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let mut rng = rng_for(mix_seed(seed, k as u64));
            let series = Series::new(gaussian_noise(&mut rng, n, 1.0))?;
            let h = ((n as f64).ln().round() as usize).clamp(1, n / 2);
            Ok((series, h))
        })
        .collect::<Result<_>>()?;
    let run = |(series, h): &(Series, usize)| {
        sara_rank(
            series,
            *h,
            InfoCriterion::Mbic,
            None,
            Neighborhood::default(),
        )
    };

    // Warm-up pass, not timed.
    for input in &inputs {
        std::hint::black_box(run(input)?);
    }
    let mut times = vec![Vec::with_capacity(reps.max(1)); inputs.len()];
    for _ in 0..reps.max(1) {
        for (input, t) in inputs.iter().zip(&mut times) {
            let start = Instant::now();
            std::hint::black_box(run(input)?);
            t.push(start.elapsed().as_secs_f64());
        }
    }
    Ok(n_grid
        .iter()
        .zip(times)
        .map(|(&n, mut t)| {
            t.sort_by(f64::total_cmp);
            (n, t[t.len() / 2])
        })
        .collect())
}

pub fn write_timing_tsv<W: Write>(rows: &[(usize, f64)], mut out: W) -> io::Result<()> {
    writeln!(out, "n\tmedian_seconds")?;
    for (n, t) in rows {
        writeln!(out, "{n}\t{t}")?;
    }
    Ok(())
}
