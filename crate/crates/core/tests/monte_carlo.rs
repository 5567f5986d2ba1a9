//! Monte Carlo properties of the ranking simulation and the two-group model.

use surveyerr_core::ranking::{expected_tau, required_sample_size, sample_size_lattice, RankSimConfig, TauSummary};
use surveyerr_core::synthetic::us_like_truth;
use surveyerr_core::twogroup::{expected_bias, simulate_many, TwoGroupParams};
use surveyerr_core::{GeoTruth, RngSeed};

fn combined_se(a: &TauSummary, b: &TauSummary) -> f64 {
    (a.standard_error().powi(2) + b.standard_error().powi(2)).sqrt()
}

/// Mean tau for 51 US-like geos with rates evenly spaced on [0.2, 0.4] at a
/// national sample of 20,000, from this module at 10,000 replications
/// (seed 20210327, SE 4.7e-4).
const US_LIKE_TAU_20000: f64 = 0.6891293075570334;
const US_LIKE_TAU_20000_SE: f64 = 0.00047102552030435036;

#[test]
fn us_like_expected_tau_matches_frozen_oracle() {
    let config = RankSimConfig::new(us_like_truth(0.2, 0.4), 20_000, RngSeed(99));
    let s = expected_tau(&config).unwrap();
    let tol = 3.0 * (s.standard_error().powi(2) + US_LIKE_TAU_20000_SE.powi(2)).sqrt();
    assert!((s.mean_tau - US_LIKE_TAU_20000).abs() < tol, "{s:?}");
}

#[test]
fn equal_rates_carry_no_signal() {
    let truth: Vec<GeoTruth> = (0..30).map(|i| GeoTruth::new(format!("g{i}"), 500_000, 0.3)).collect();
    let s = expected_tau(&RankSimConfig::new(truth, 6000, RngSeed(3))).unwrap();
    assert!(s.mean_tau.abs() < 3.0 * s.standard_error(), "{s:?}");
}

#[test]
fn tau_nondecreasing_in_sample_size() {
    let truth = us_like_truth(0.2, 0.4);
    let summaries: Vec<TauSummary> = [500u64, 2000, 8000, 32000, 128000]
        .iter()
        .map(|&n| expected_tau(&RankSimConfig::new(truth.clone(), n, RngSeed(11))).unwrap())
        .collect();
    for w in summaries.windows(2) {
        assert!(
            w[1].mean_tau >= w[0].mean_tau - 3.0 * combined_se(&w[0], &w[1]),
            "{w:?}"
        );
    }
    assert!(summaries[4].mean_tau > summaries[0].mean_tau + 0.3);
}

#[test]
fn heterogeneity_makes_ranking_easier() {
    let narrow = expected_tau(&RankSimConfig::new(us_like_truth(0.28, 0.32), 10_000, RngSeed(12))).unwrap();
    let base = expected_tau(&RankSimConfig::new(us_like_truth(0.25, 0.35), 10_000, RngSeed(12))).unwrap();
    let wide = expected_tau(&RankSimConfig::new(us_like_truth(0.2, 0.4), 10_000, RngSeed(12))).unwrap();
    assert!(base.mean_tau - narrow.mean_tau > 3.0 * combined_se(&base, &narrow));
    assert!(wide.mean_tau - base.mean_tau > 3.0 * combined_se(&wide, &base));
}

/// The bisection result must agree with an exhaustive lattice sweep run at
/// ten times the replications.
#[test]
fn required_sample_size_matches_exhaustive_sweep() {
    let truth: Vec<GeoTruth> = (0..10)
        .map(|i| GeoTruth::new(format!("g{i}"), 1_000_000 * (1 + i as u64 % 3), 0.2 + 0.02 * i as f64))
        .collect();
    let (lo, hi, ratio, reps) = (200, 50_000, 1.05, 200);
    let found = required_sample_size(&truth, 0.8, reps, RngSeed(5), (lo, hi), ratio).unwrap();
    assert!(found.summary.mean_tau >= 0.8);

    let lattice = sample_size_lattice(lo, hi, ratio).unwrap();
    let sweep_index = lattice
        .iter()
        .position(|&n| {
            let s =
                expected_tau(&RankSimConfig::new(truth.clone(), n, RngSeed(5)).with_replications(10 * reps)).unwrap();
            s.mean_tau >= 0.8
        })
        .unwrap();
    let found_index = lattice.iter().position(|&n| n == found.n).unwrap();
    assert!(
        found_index.abs_diff(sweep_index) <= 1,
        "bisection {} vs sweep {}",
        found.n,
        lattice[sweep_index]
    );
    assert!(found.evaluated.len() < 12);
}

#[test]
fn rank_simulation_is_deterministic_across_thread_counts() {
    let config = RankSimConfig::new(us_like_truth(0.2, 0.4), 3000, RngSeed(8)).with_replications(300);
    let reference = expected_tau(&config).unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let s = pool.install(|| expected_tau(&config).unwrap());
        assert_eq!(s.mean_tau.to_bits(), reference.mean_tau.to_bits());
        assert_eq!(s.sd_tau.to_bits(), reference.sd_tau.to_bits());
    }
}

#[test]
fn two_group_simulation_tracks_closed_form() {
    let p = TwoGroupParams {
        population: 200_000,
        sample_size: 2_400,
        ..TwoGroupParams::default()
    };
    for rho in [0.2, 0.7] {
        let runs = simulate_many(&p, rho, 1000, 100).unwrap();
        let biases: Vec<f64> = runs.iter().map(|r| r.empirical_bias).collect();
        let m = biases.len() as f64;
        let mean = biases.iter().sum::<f64>() / m;
        let sd = (biases.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
        let expected = expected_bias(&p, rho).unwrap();
        assert!(
            (mean - expected).abs() < 3.0 * sd / m.sqrt(),
            "rho {rho}: {mean} vs {expected}"
        );
    }
}
