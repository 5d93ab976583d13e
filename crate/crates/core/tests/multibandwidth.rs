// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use sara::multibandwidth::{
    default_bandwidths, msara_detect, pool_candidates, select_from_pool, MultiBandConfig,
    SigmaSource, EXACT_POOL_MAX,
};
use sara::pipeline::sara_rank;
use sara::selection::{backward_stepwise, best_subset, refine_subset};
use sara::simulation::{gaussian_noise, mix_seed, rng_for};
use sara::{equal_weight_diagnostic, InfoCriterion, Neighborhood, SaraError, Series};

fn white_noise(n: usize, seed: u64) -> Series {
    Series::new(gaussian_noise(&mut rng_for(seed), n, 1.0)).unwrap()
}

#[test]
fn three_sigma_threshold_has_the_gaussian_tail_rate() {
    // Pointwise, `C = 3` is a two-sided three-sigma rule (tail 0.0027).
    let cfg = MultiBandConfig {
        sigma_source: SigmaSource::Known(1.0),
        threshold_constant: 3.0,
        ..MultiBandConfig::auto(1000).unwrap()
    };
    let (mut over, mut total) = (0usize, 0usize);
    for r in 0..100 {
        let s = white_noise(1000, mix_seed(3, r));
        for &h in &cfg.bandwidths {
            let lambda = cfg.threshold(h, 1.0);
            let p = equal_weight_diagnostic(&s, h).unwrap();
            over += p.values().iter().filter(|d| d.abs() > lambda).count();
            total += p.len();
        }
    }
    let rate = over as f64 / total as f64;
    assert!((0.0015..=0.004).contains(&rate), "tail rate {rate}");
}

#[test]
fn null_pool_is_empty_at_a_family_wise_constant() {
    // The maximum over ~n/h roughly independent peaks needs C near
    // sqrt(2 log n) + 1 before an empty pool becomes typical.
    let cfg = MultiBandConfig {
        threshold_constant: 4.5,
        ..MultiBandConfig::auto(1000).unwrap()
    };
    let reps = 200;
    let empty = (0..reps)
        .filter(|&r| {
            pool_candidates(&white_noise(1000, mix_seed(3, r)), &cfg)
                .unwrap()
                .is_empty()
        })
        .count();
    assert!(
        empty as f64 >= 0.95 * reps as f64,
        "empty in {empty}/{reps}"
    );
}

#[test]
fn pool_shrinks_as_the_constant_grows() {
    for r in 0..20 {
        let s = common::noisy_steps(600, &[150, 300, 310, 450], &[1.0, -1.0, 0.8, 0.6], 0.8, r);
        let mut prev: Option<Vec<usize>> = None;
        for c in [0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let mut cfg = MultiBandConfig::new(vec![6, 12, 18]);
            cfg.threshold_constant = c;
            cfg.sigma_source = SigmaSource::Known(0.8);
            let pos = pool_candidates(&s, &cfg).unwrap().positions();
            if let Some(p) = &prev {
                assert!(
                    pos.iter().all(|x| p.contains(x)),
                    "C = {c} added candidates"
                );
            }
            prev = Some(pos);
        }
    }
}

#[test]
fn final_model_is_drawn_from_the_pool() {
    for r in 0..30 {
        let s = common::noisy_steps(
            500,
            &[100, 120, 300],
            &[1.0, -1.5, 0.7],
            0.5,
            mix_seed(9, r),
        );
        let cfg = MultiBandConfig::auto(500).unwrap();
        let pool = pool_candidates(&s, &cfg).unwrap().positions();
        let m = msara_detect(&s, &cfg).unwrap();
        assert!(m.changepoints.iter().all(|c| pool.contains(c)));
        assert!(m.changepoints.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn pooled_positions_are_distinct_with_max_score() {
    let s = common::noisy_steps(400, &[200], &[2.0], 0.3, 4);
    let cfg = MultiBandConfig::new(vec![5, 10, 20]);
    let pool = pool_candidates(&s, &cfg).unwrap();
    let mut pos = pool.positions();
    pos.sort_unstable();
    pos.dedup();
    assert_eq!(pos.len(), pool.len());
    let top = &pool.entries()[0];
    assert!((top.position as i64 - 200).abs() <= 1);
}

#[test]
fn large_pools_use_refined_backward_deletion() {
    // One bandwidth and a tiny constant: the pool exceeds the exact-search
    // limit, so the result is deletion followed by refinement.
    let s = common::noisy_steps(2000, &[500, 1000, 1500], &[1.0, -1.0, 1.0], 1.0, 8);
    let mut cfg = MultiBandConfig::new(vec![8]);
    cfg.threshold_constant = 0.2;
    let pool = pool_candidates(&s, &cfg).unwrap();
    assert!(pool.len() > EXACT_POOL_MAX);
    let step = backward_stepwise(&s, &pool, InfoCriterion::Mbic).unwrap();
    let refined = refine_subset(&s, &pool, InfoCriterion::Mbic, &step.changepoints).unwrap();
    assert!(refined.score <= step.score);
    assert_eq!(msara_detect(&s, &cfg).unwrap(), refined);
    assert_eq!(
        select_from_pool(&s, &pool, InfoCriterion::Mbic).unwrap(),
        refined
    );
}

#[test]
fn small_pools_use_exhaustive_search() {
    let s = common::noisy_steps(300, &[100, 200], &[1.0, -1.0], 0.5, 2);
    let cfg = MultiBandConfig::new(vec![10, 20]);
    let pool = pool_candidates(&s, &cfg).unwrap();
    assert!(pool.len() <= EXACT_POOL_MAX);
    let exact = best_subset(&s, &pool, InfoCriterion::Mbic).unwrap();
    assert_eq!(msara_detect(&s, &cfg).unwrap(), exact);
}

#[test]
fn single_bandwidth_agrees_with_ranking_on_a_clean_signal() {
    let s = common::noisy_steps(600, &[200, 400], &[2.0, -2.0], 0.3, 12);
    let mut cfg = MultiBandConfig::new(vec![12]);
    cfg.neighborhood = Neighborhood::Bandwidth;
    let multi = msara_detect(&s, &cfg).unwrap();
    let rank = sara_rank(&s, 12, InfoCriterion::Mbic, None, Neighborhood::Bandwidth).unwrap();
    assert_eq!(multi.changepoints, rank.changepoints);
    assert_eq!(multi.changepoints, vec![200, 400]);
}

#[test]
fn default_bandwidths_follow_log_n() {
    assert_eq!(default_bandwidths(1000).unwrap(), vec![7, 14, 21]);
    assert_eq!(default_bandwidths(497).unwrap(), vec![6, 12, 19]);
    assert!(matches!(
        default_bandwidths(5),
        Err(SaraError::SeriesTooShort { .. })
    ));
    let small = default_bandwidths(12).unwrap();
    assert!(small.iter().all(|&h| (2..=6).contains(&h)));
}

#[test]
fn invalid_configs_are_rejected() {
    let s = white_noise(100, 1);
    let mut cfg = MultiBandConfig::new(vec![5, 60]);
    assert!(msara_detect(&s, &cfg).is_err());
    cfg.bandwidths = vec![5, 10];
    cfg.threshold_constant = -1.0;
    assert!(msara_detect(&s, &cfg).is_err());
    cfg.threshold_constant = 2.0;
    cfg.sigma_source = SigmaSource::Known(f64::NAN);
    assert!(msara_detect(&s, &cfg).is_err());
}
