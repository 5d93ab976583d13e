// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use proptest::prelude::*;
use sara::diagnostics::diagnostic;
use sara::{
    equal_weight_diagnostic, local_linear_diagnostic, local_maximizers, local_maximizers_within,
    threshold_candidates, Kernel, Neighborhood, SaraError, Series, WeightScheme,
};

fn series_and_bandwidth() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (4usize..=200).prop_flat_map(|n| (prop::collection::vec(-50.0f64..50.0, n), 1usize..=n / 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recursion_matches_direct_sums((y, h) in series_and_bandwidth()) {
        let p = equal_weight_diagnostic(&Series::new(y.clone()).unwrap(), h).unwrap();
        prop_assert_eq!(p.domain_start(), h);
        prop_assert_eq!(p.domain_end(), y.len() - h);
        for (x, d) in p.iter() {
            prop_assert!((d - common::direct_diagnostic(&y, x, h)).abs() <= 1e-9);
        }
    }

    #[test]
    fn maximizers_match_window_scan((y, h) in series_and_bandwidth()) {
        let p = equal_weight_diagnostic(&Series::new(y).unwrap(), h).unwrap();
        let mut fast = local_maximizers(&p).positions();
        fast.sort_unstable();
        prop_assert_eq!(fast, common::window_check_maximizers(&p, h));
    }

    #[test]
    fn radius_maximizers_match_window_scan((y, h) in series_and_bandwidth(), r in 1usize..12) {
        let p = equal_weight_diagnostic(&Series::new(y).unwrap(), h).unwrap();
        let mut fast = local_maximizers_within(&p, r).positions();
        fast.sort_unstable();
        prop_assert_eq!(fast, common::window_check_maximizers(&p, r));
    }

    #[test]
    fn maximizers_are_spaced_and_sorted_by_score((y, h) in series_and_bandwidth()) {
        let p = equal_weight_diagnostic(&Series::new(y).unwrap(), h).unwrap();
        let c = local_maximizers(&p);
        let scores: Vec<f64> = c.entries().iter().map(|e| e.score).collect();
        prop_assert!(scores.windows(2).all(|w| w[0] >= w[1]));
        let mut pos = c.positions();
        pos.sort_unstable();
        prop_assert!(pos.windows(2).all(|w| w[1] - w[0] >= h));
        for e in c.entries() {
            prop_assert_eq!(e.score, p.at(e.position).unwrap().abs());
            prop_assert_eq!(e.bandwidth, h);
        }
    }

    #[test]
    fn diagnostic_is_linear(
        (y, h) in series_and_bandwidth(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let n = y.len();
        let z: Vec<f64> = (0..n).map(|i| ((i as u64 ^ seed) % 97) as f64 / 7.0).collect();
        let combo: Vec<f64> = y.iter().zip(&z).map(|(u, v)| a * u + b * v).collect();
        let dy = equal_weight_diagnostic(&Series::new(y).unwrap(), h).unwrap();
        let dz = equal_weight_diagnostic(&Series::new(z).unwrap(), h).unwrap();
        let dc = equal_weight_diagnostic(&Series::new(combo).unwrap(), h).unwrap();
        for ((u, v), w) in dy.values().iter().zip(dz.values()).zip(dc.values()) {
            prop_assert!((a * u + b * v - w).abs() <= 1e-8);
        }
    }

    #[test]
    fn threshold_keeps_exactly_the_large_scores((y, h) in series_and_bandwidth(), lambda in 0.0f64..30.0) {
        let p = equal_weight_diagnostic(&Series::new(y).unwrap(), h).unwrap();
        let all = local_maximizers(&p);
        let kept = threshold_candidates(&all, lambda);
        prop_assert!(kept.entries().iter().all(|c| c.score > lambda));
        let expect = all.entries().iter().filter(|c| c.score > lambda).count();
        prop_assert_eq!(kept.len(), expect);
    }
}

/// Weighted least-squares slope with the centered-moment formula.
fn wls_slope(y: &[f64], x: usize, h: usize, kernel: Kernel) -> f64 {
    let pts: Vec<(f64, f64, f64)> = (x - h..=x + h)
        .filter(|&i| i >= 1 && i <= y.len())
        .map(|i| {
            let u = i as f64 - x as f64;
            (kernel.eval(u / h as f64), u, y[i - 1])
        })
        .filter(|&(w, _, _)| w > 0.0)
        .collect();
    let sw: f64 = pts.iter().map(|p| p.0).sum();
    let ubar = pts.iter().map(|p| p.0 * p.1).sum::<f64>() / sw;
    let ybar = pts.iter().map(|p| p.0 * p.2).sum::<f64>() / sw;
    let sxy: f64 = pts.iter().map(|p| p.0 * (p.1 - ubar) * (p.2 - ybar)).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * (p.1 - ubar).powi(2)).sum();
    sxy / sxx
}

#[test]
fn local_linear_matches_weighted_regression() {
    let y: Vec<f64> = (0..30)
        .map(|i| ((i * 37 % 11) as f64) * 0.3 + if i >= 15 { 2.0 } else { 0.0 })
        .collect();
    let s = Series::new(y.clone()).unwrap();
    for kernel in [Kernel::Uniform, Kernel::Epanechnikov] {
        let p = local_linear_diagnostic(&s, 5, kernel).unwrap();
        assert_eq!(p.len(), 21);
        for (x, d) in p.iter() {
            let want = wls_slope(&y, x, 5, kernel);
            assert!((d - want).abs() < 1e-10, "x={x}: {d} vs {want}");
        }
    }
}

#[test]
fn local_linear_recovers_ramp_slope() {
    let y: Vec<f64> = (1..=40).map(|i| 3.0 - 0.25 * i as f64).collect();
    let s = Series::new(y).unwrap();
    let p = diagnostic(&s, 6, WeightScheme::LocalLinear(Kernel::Epanechnikov)).unwrap();
    assert!(p.values().iter().all(|d| (d + 0.25).abs() < 1e-12));
}

#[test]
fn bandwidth_limits() {
    let s = Series::new(vec![0.0; 10]).unwrap();
    assert!(matches!(
        equal_weight_diagnostic(&s, 0),
        Err(SaraError::BandwidthNonPositive { .. })
    ));
    assert!(matches!(
        equal_weight_diagnostic(&s, 6),
        Err(SaraError::BandwidthTooLarge { h: 6, max: 5 })
    ));
    assert!(equal_weight_diagnostic(&s, 5).is_ok());
    assert!(local_linear_diagnostic(&s, 1, Kernel::Uniform).is_err());
}

#[test]
fn half_neighbourhood_separates_close_peaks() {
    // Jumps 6 apart with h = 8: one strict maximizer, two half-radius ones.
    // The second jump drags the first peak two places left: |D(38)| = 0.75
    // while |D(40)| = 0.625.
    let mut y = vec![0.0; 40];
    y.extend([1.0; 6]);
    y.extend([-0.5; 40]);
    let p = equal_weight_diagnostic(&Series::new(y).unwrap(), 8).unwrap();
    let strict = threshold_candidates(&local_maximizers(&p), 0.3).positions();
    let mut half =
        threshold_candidates(&Neighborhood::HalfBandwidth.maximizers(&p), 0.3).positions();
    half.sort_unstable();
    assert_eq!(strict, vec![46]);
    assert_eq!(half, vec![38, 46]);
}
