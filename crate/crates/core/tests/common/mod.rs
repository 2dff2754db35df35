//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use biclust_tw::localization::{profile_likelihood, restart_rng, EntropyFn};
use biclust_tw::model::{assignment_from_rectangles, standardize};
use biclust_tw::synthgen::{generate, null_layout, Distribution, GeneratorSpec, LayoutSpec};
use biclust_tw::{BiclusterAssignment, ObservedMatrix};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn normal_matrix(n: usize, p: usize, rng: &mut impl Rng) -> ObservedMatrix {
    let data = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    ObservedMatrix::from_row_major(n, p, data).unwrap()
}

pub fn uniform_matrix(n: usize, p: usize, rng: &mut impl Rng) -> ObservedMatrix {
    let data = (0..n * p).map(|_| rng.random::<f64>()).collect();
    ObservedMatrix::from_row_major(n, p, data).unwrap()
}

fn random_subset(len: usize, rng: &mut impl Rng) -> Vec<usize> {
    let size = rng.random_range(1..=len);
    let mut v = sample(rng, len, size).into_vec();
    v.sort_unstable();
    v
}

/// `k` pairwise disjoint rectangles, each with at least two entries, leaving
/// at least two background entries. Built by rejection sampling.
pub fn random_assignment(n: usize, p: usize, k: usize, rng: &mut impl Rng) -> BiclusterAssignment {
    assert!(
        2 * k + 2 <= n * p,
        "{k} rectangles do not fit a {n}x{p} matrix"
    );
    'outer: loop {
        let mut rects: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut used = vec![false; n * p];
        for _ in 0..k {
            let mut placed = false;
            for _ in 0..50 {
                let rows = random_subset(n, rng);
                let cols = random_subset(p, rng);
                if rows.len() * cols.len() < 2 {
                    continue;
                }
                if rows.iter().any(|&i| cols.iter().any(|&j| used[i * p + j])) {
                    continue;
                }
                let free = used.iter().filter(|&&u| !u).count();
                if free < rows.len() * cols.len() + 2 {
                    continue;
                }
                for &i in &rows {
                    for &j in &cols {
                        used[i * p + j] = true;
                    }
                }
                rects.push((rows, cols));
                placed = true;
                break;
            }
            if !placed {
                continue 'outer;
            }
        }
        return assignment_from_rectangles(n, p, &rects).unwrap();
    }
}

/// Global optimum of the profile likelihood over single rectangles.
pub fn exhaustive_single_rectangle(a: &ObservedMatrix, f: &EntropyFn) -> f64 {
    let (n, p) = a.dim();
    let mut best = f64::NEG_INFINITY;
    for rmask in 1u32..(1 << n) {
        for cmask in 1u32..(1 << p) {
            if rmask == (1 << n) - 1 && cmask == (1 << p) - 1 {
                continue;
            }
            let rows: Vec<usize> = (0..n).filter(|i| rmask >> i & 1 == 1).collect();
            let cols: Vec<usize> = (0..p).filter(|j| cmask >> j & 1 == 1).collect();
            let g = assignment_from_rectangles(n, p, &[(rows, cols)]).unwrap();
            best = best.max(profile_likelihood(a, &g, f).unwrap());
        }
    }
    best
}

/// Fraction of entry pairs on which two labelings agree about co-membership.
pub fn rand_index(x: &[u32], y: &[u32]) -> f64 {
    assert_eq!(x.len(), y.len());
    let k = 1 + *x.iter().chain(y).max().unwrap() as usize;
    let mut table = vec![0u64; k * k];
    for (&a, &b) in x.iter().zip(y) {
        table[a as usize * k + b as usize] += 1;
    }
    let pairs = |c: u64| c * c.saturating_sub(1) / 2;
    let total = pairs(x.len() as u64);
    let joint: u64 = table.iter().map(|&c| pairs(c)).sum();
    let rows: u64 = (0..k)
        .map(|a| pairs(table[a * k..(a + 1) * k].iter().sum()))
        .sum();
    let cols: u64 = (0..k)
        .map(|b| pairs((0..k).map(|a| table[a * k + b]).sum()))
        .sum();
    (total + 2 * joint - rows - cols) as f64 / total as f64
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// property checks shared by the proptest suite and the acceptance run

pub fn shape_strategy() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (3usize..14, 3usize..14, 0usize..4, any::<u64>())
}

/// Residuals have mean 0 and mean square 1 on every group.
pub fn check_standardization(n: usize, p: usize, k: usize, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let a = normal_matrix(n, p, &mut r);
    let g = random_assignment(n, p, k, &mut r);
    let z = standardize(&a, &g).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for group in 0..=g.k() {
        let vals: Vec<f64> = z
            .as_slice()
            .iter()
            .zip(g.as_slice())
            .filter(|(_, &h)| h as usize == group)
            .map(|(&v, _)| v)
            .collect();
        let m = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / m;
        let sq = vals.iter().map(|v| v * v).sum::<f64>() / m;
        prop_assert!(mean.abs() < 1e-8, "group {group} mean {mean}");
        prop_assert!((sq - 1.0).abs() < 1e-8, "group {group} mean square {sq}");
    }
    Ok(())
}

/// `c A + d` with `c > 0` gives the same residuals.
pub fn check_affine_invariance(
    n: usize,
    p: usize,
    k: usize,
    seed: u64,
    c: f64,
    d: f64,
) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let a = normal_matrix(n, p, &mut r);
    let g = random_assignment(n, p, k, &mut r);
    let shifted =
        ObservedMatrix::from_row_major(n, p, a.as_slice().iter().map(|x| c * x + d).collect())
            .unwrap();
    let z0 = standardize(&a, &g).unwrap();
    let z1 = standardize(&shifted, &g).unwrap();
    for (x, y) in z0.as_slice().iter().zip(z1.as_slice()) {
        prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
    }
    Ok(())
}

/// The staircase layout is a valid disjoint structure matching its ranges.
pub fn check_layout(k: usize, n: usize, p: usize) -> Result<(), TestCaseError> {
    let spec = LayoutSpec::new(k, n, p);
    let g = match null_layout(k, n, p) {
        Ok(g) => g,
        Err(_) => {
            prop_assert!(spec.row_block_size() == 0 || spec.col_block_size() == 0);
            return Ok(());
        }
    };
    prop_assert_eq!(g.k(), k);
    let mut covered = vec![0u32; n * p];
    for b in 1..=k {
        let (rows, cols) = spec.bicluster_ranges(b);
        prop_assert!(rows.end <= n && cols.end <= p);
        for i in rows.clone() {
            for j in cols.clone() {
                covered[i * p + j] += 1;
                prop_assert_eq!(g.get(i, j), b);
            }
        }
    }
    prop_assert!(covered.iter().all(|&c| c <= 1));
    prop_assert!(g.counts()[0] > 0);
    Ok(())
}

/// Generation and localization are pure functions of the seed.
pub fn check_determinism(seed: u64) -> Result<(), TestCaseError> {
    let spec = GeneratorSpec {
        distribution: Distribution::gaussian_default(),
        layout: LayoutSpec::new(3, 40, 30),
        seed,
    };
    let (a1, g1) = generate(&spec).unwrap();
    let (a2, g2) = generate(&spec).unwrap();
    prop_assert_eq!(a1.as_slice(), a2.as_slice());
    prop_assert_eq!(g1.as_slice(), g2.as_slice());

    let config = biclust_tw::LocalizerConfig {
        restarts: 2,
        ..Default::default()
    };
    let l1 = biclust_tw::localize(&a1, 2, &config, seed).unwrap();
    let l2 = biclust_tw::localize(&a1, 2, &config, seed).unwrap();
    prop_assert_eq!(l1.assignment.as_slice(), l2.assignment.as_slice());
    prop_assert_eq!(l1.objective.to_bits(), l2.objective.to_bits());

    let mut r1 = restart_rng(seed, 3);
    let mut r2 = restart_rng(seed, 3);
    prop_assert_eq!(r1.random::<u64>(), r2.random::<u64>());
    Ok(())
}
