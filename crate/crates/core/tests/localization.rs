mod common;

use biclust_tw::localization::{
    anneal, compress, localize, restart_rng, sa_localize, sa_localize_compressed, ward_cluster,
    ward_linkage, CoolingSchedule, EntropyFn, EntropyKind, LocalizerConfig, WeightedGrid,
};
use biclust_tw::synthgen::{generate, Distribution, GeneratorSpec, LayoutSpec};
use biclust_tw::{profile_likelihood, Error};
use common::*;
use rand::Rng;

/// Greedy Ward merging by minimal increase of the within-cluster sum of
/// squares, recomputed from the raw points at every step.
fn naive_ward(points: &[Vec<f64>], l: usize) -> (Vec<usize>, Vec<f64>) {
    let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    let centroid = |c: &[usize]| -> Vec<f64> {
        let dim = points[0].len();
        let mut m = vec![0.0; dim];
        for &i in c {
            for d in 0..dim {
                m[d] += points[i][d] / c.len() as f64;
            }
        }
        m
    };
    let mut heights = Vec::new();
    while clusters.len() > l.max(1) {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (ca, cb) = (centroid(&clusters[a]), centroid(&clusters[b]));
                let (na, nb) = (clusters[a].len() as f64, clusters[b].len() as f64);
                let dist: f64 = ca.iter().zip(&cb).map(|(x, y)| (x - y) * (x - y)).sum();
                let cost = 2.0 * na * nb / (na + nb) * dist;
                if cost < best.0 {
                    best = (cost, a, b);
                }
            }
        }
        heights.push(best.0);
        let merged = clusters.remove(best.2);
        clusters[best.1].extend(merged);
    }
    let mut labels = vec![usize::MAX; points.len()];
    let mut order: Vec<&Vec<usize>> = clusters.iter().collect();
    order.sort_by_key(|c| *c.iter().min().unwrap());
    for (label, c) in order.into_iter().enumerate() {
        for &i in c {
            labels[i] = label;
        }
    }
    (labels, heights)
}

#[test]
fn ward_matches_naive_merging() {
    let mut r = rng(21);
    for _ in 0..30 {
        let count = r.random_range(2..25);
        let dim = r.random_range(1..5);
        let points: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..dim).map(|_| r.random::<f64>() * 10.0).collect())
            .collect();
        for l in 1..=count {
            let (want, _) = naive_ward(&points, l);
            assert_eq!(
                ward_cluster(&points, l).unwrap(),
                want,
                "count {count} l {l}"
            );
        }
        let (_, heights) = naive_ward(&points, 1);
        let flat: Vec<f64> = points.iter().flatten().copied().collect();
        let d = ward_linkage(&flat, count, dim);
        for (m, h) in d.merges().iter().zip(&heights) {
            assert!((m.height - h).abs() <= 1e-9 * h.max(1.0));
        }
    }
}

#[test]
fn greedy_trace_is_nondecreasing() {
    let mut r = rng(8);
    let a = normal_matrix(30, 25, &mut r);
    let config = LocalizerConfig {
        restarts: 1,
        cooling: CoolingSchedule::greedy(5000),
        record_trace: true,
        uncompressed: true,
        ..Default::default()
    };
    let loc = localize(&a, 2, &config, 1).unwrap();
    let trace = loc.outcome.trace.unwrap();
    assert_eq!(trace.len(), 5000);
    assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn planted_structure_is_recovered() {
    let spec = GeneratorSpec {
        distribution: Distribution::gaussian_default(),
        layout: LayoutSpec::new(3, 140, 120),
        seed: 4,
    };
    let (a, truth) = generate(&spec).unwrap();
    let loc = localize(&a, 3, &LocalizerConfig::default(), 9).unwrap();
    let ri = rand_index(loc.assignment.as_slice(), truth.as_slice());
    assert!(ri >= 0.95, "Rand index {ri}");
    let f_truth = profile_likelihood(&a, &truth, &EntropyFn::Gaussian).unwrap();
    assert!(loc.objective >= f_truth - 1e-9);
}

#[test]
fn uncompressed_and_compressed_entry_points() {
    let mut r = rng(2);
    let a = uniform_matrix(12, 10, &mut r);
    let f = EntropyFn::from(EntropyKind::Bernoulli);
    let schedule = CoolingSchedule::geometric(0.99, 1e-3);
    let g = sa_localize(&a, 2, &f, &schedule, &mut restart_rng(1, 0)).unwrap();
    assert_eq!(g.k(), 2);
    let g = sa_localize_compressed(&a, 2, &f, 4, 4, &schedule, &mut restart_rng(1, 0)).unwrap();
    assert_eq!(g.k(), 2);
    assert_eq!(g.dim(), (12, 10));
}

#[test]
fn restart_selection_is_stable() {
    let mut r = rng(3);
    let a = normal_matrix(60, 50, &mut r);
    let config = LocalizerConfig::default();
    let x = localize(&a, 2, &config, 77).unwrap();
    let y = localize(&a, 2, &config, 77).unwrap();
    assert_eq!(x.best_restart, y.best_restart);
    assert_eq!(x.restarts, y.restarts);
    let best = x
        .restarts
        .iter()
        .filter_map(|r| r.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(x.objective, best);
    assert_eq!(x.restarts[x.best_restart].objective, Some(best));
}

#[test]
fn infeasible_initial_state() {
    let grid = WeightedGrid::new(2, 2, vec![0.0; 4], vec![1.0; 4]);
    let err = anneal(
        &grid,
        4,
        &EntropyFn::Gaussian,
        &CoolingSchedule::synthetic_default(),
        &mut restart_rng(0, 0),
        false,
    )
    .unwrap_err();
    assert!(matches!(err, Error::InfeasibleInit { k0: 4, .. }));
}

#[test]
fn too_many_clusters() {
    let mut r = rng(1);
    let a = normal_matrix(5, 5, &mut r);
    assert!(matches!(
        compress(&a, 6, 2),
        Err(Error::LTooLarge { l: 6, count: 5 })
    ));
}

#[test]
fn invalid_configuration() {
    let mut r = rng(1);
    let a = normal_matrix(5, 5, &mut r);
    let config = LocalizerConfig {
        restarts: 0,
        ..Default::default()
    };
    assert!(matches!(
        localize(&a, 1, &config, 0),
        Err(Error::InvalidConfig(_))
    ));
    let config = LocalizerConfig {
        cooling: CoolingSchedule::geometric(1.5, 1e-5),
        ..Default::default()
    };
    assert!(localize(&a, 1, &config, 0).is_err());
    assert!(localize(&a, 0, &LocalizerConfig::default(), 0).is_err());
}
