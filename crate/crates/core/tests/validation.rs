mod common;

use biclust_tw::synthgen::Distribution;
use biclust_tw::tw::TwTable;
use biclust_tw::validation::{
    growth_check, ks_statistic, run_ensemble, tail_probabilities, EnsembleConfig, GrowthConfig,
};
use biclust_tw::{Error, LocalizerConfig};
use common::rng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Inverse of the tabulated CDF by bisection.
fn inverse_cdf(table: &TwTable, u: f64) -> f64 {
    let (mut lo, mut hi) = (-8.0, 8.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if table.cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Direct evaluation of the KS distance, one sample point at a time.
fn naive_ks(values: &[f64], table: &TwTable) -> f64 {
    let r = values.len() as f64;
    let mut d: f64 = 0.0;
    for &x in values {
        let below = values.iter().filter(|&&y| y < x).count() as f64;
        let at_or_below = values.iter().filter(|&&y| y <= x).count() as f64;
        let f = table.cdf(x);
        d = d
            .max((at_or_below / r - f).abs())
            .max((below / r - f).abs());
    }
    d
}

#[test]
fn near_perfect_fit() {
    let table = TwTable::embedded();
    let r = 400;
    let values: Vec<f64> = (1..=r)
        .map(|i| inverse_cdf(&table, i as f64 / (r + 1) as f64))
        .collect();
    let ks = ks_statistic(&values, &table).unwrap();
    assert!(ks.d <= 1.0 / (r + 1) as f64 + 1e-9, "{}", ks.d);
    assert_eq!(ks.r, r);
    assert_eq!(ks.clamped, 0);
}

#[test]
fn matches_naive_oracle_and_is_permutation_invariant() {
    let table = TwTable::embedded();
    let mut r = rng(3);
    for _ in 0..20 {
        let len = r.random_range(2..200);
        let mut values: Vec<f64> = (0..len).map(|_| r.random::<f64>()).collect();
        let ks = ks_statistic(&values, &table).unwrap();
        assert!((ks.d - naive_ks(&values, &table)).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&ks.d));
        assert!((ks.d_sqrt_r - ks.d * (len as f64).sqrt()).abs() < 1e-12);
        values.shuffle(&mut r);
        assert_eq!(ks_statistic(&values, &table).unwrap().d, ks.d);
    }
}

#[test]
fn values_outside_grid_are_counted() {
    let table = TwTable::embedded();
    let ks = ks_statistic(&[-50.0, 0.0, 50.0], &table).unwrap();
    assert_eq!(ks.clamped, 2);
    assert!(matches!(
        ks_statistic(&[], &table),
        Err(Error::EmptyEnsemble)
    ));
    assert!(ks_statistic(&[1.0], &table).is_err());
}

#[test]
fn tails_are_monotone_in_alpha() {
    let table = TwTable::embedded();
    let mut r = rng(4);
    let values: Vec<f64> = (0..500).map(|_| r.random_range(-4.0..4.0)).collect();
    let alphas: Vec<f64> = (1..=50).map(|i| i as f64 / 100.0).collect();
    let tails = tail_probabilities(&values, &alphas, &table).unwrap();
    assert!(tails.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn ensemble_is_reproducible() {
    let table = TwTable::embedded();
    let config = EnsembleConfig {
        n: 140,
        p: 120,
        trials: 6,
        seed: 17,
        ..Default::default()
    };
    let a = run_ensemble(&config, &table).unwrap();
    let b = run_ensemble(&config, &table).unwrap();
    assert_eq!(a.trials, b.trials);
    assert_eq!(a.trials.len(), 6);
    assert_eq!(a.failures(), 0);
    let distinct: std::collections::HashSet<u64> = a.seeds().into_iter().collect();
    assert_eq!(distinct.len(), 6);
}

#[test]
fn failed_trials_are_recorded_not_counted() {
    // a constant bicluster cannot be standardized
    let table = TwTable::embedded();
    let config = EnsembleConfig {
        distribution: Distribution::Bernoulli {
            b: vec![0.5, 1.0, 0.5, 0.5],
        },
        n: 70,
        p: 60,
        trials: 3,
        ..Default::default()
    };
    let result = run_ensemble(&config, &table).unwrap();
    assert_eq!(result.failures(), 3);
    assert!(result.t_values().is_empty());
    assert!(result.trials[0]
        .error
        .as_deref()
        .unwrap()
        .starts_with("DegenerateGroup"));
}

#[test]
fn localized_mode_runs() {
    let table = TwTable::embedded();
    let config = EnsembleConfig {
        n: 140,
        p: 120,
        trials: 2,
        oracle_assignment: false,
        localizer: LocalizerConfig {
            restarts: 2,
            ..Default::default()
        },
        ..Default::default()
    };
    let result = run_ensemble(&config, &table).unwrap();
    assert_eq!(result.t_values().len(), 2);
}

#[test]
fn growth_smoke() {
    let config = GrowthConfig {
        sizes: vec![(140, 120)],
        k: 3,
        k0: 1,
        distribution: Distribution::gaussian_default(),
        trials: 1,
        seed: 2,
        localizer: LocalizerConfig {
            restarts: 2,
            ..Default::default()
        },
        test: Default::default(),
    };
    let points = growth_check(&config, &TwTable::embedded()).unwrap();
    assert_eq!(points.len(), 1);
    assert!(points[0].mean_scaled.is_finite() && points[0].mean_scaled > 0.0);
}
