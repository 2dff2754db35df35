mod common;

use biclust_tw::synthgen::{
    generate, interpolated_means, null_layout, Distribution, GeneratorSpec, LayoutSpec,
};
use biclust_tw::Error;

/// 1-based inclusive row and column ranges of every bicluster.
fn one_based(k: usize, n: usize, p: usize) -> Vec<((usize, usize), (usize, usize))> {
    let g = null_layout(k, n, p).unwrap();
    g.rectangles()
        .into_iter()
        .map(|(rows, cols)| {
            (
                (rows[0] + 1, *rows.last().unwrap() + 1),
                (cols[0] + 1, *cols.last().unwrap() + 1),
            )
        })
        .collect()
}

#[test]
fn layout_k3_500_by_375() {
    // K1 = 7, K2 = 6, n1 = 71, p1 = 62
    assert_eq!(
        one_based(3, 500, 375),
        vec![
            ((1, 142), (1, 124)),
            ((143, 284), (63, 186)),
            ((214, 355), (187, 310)),
        ]
    );
}

#[test]
fn layout_k4_even_offsets() {
    // K1 = K2 = 8, n1 = 10, p1 = 5
    let spec = LayoutSpec::new(4, 80, 40);
    assert_eq!((spec.row_blocks(), spec.col_blocks()), (8, 8));
    assert_eq!(
        one_based(4, 80, 40),
        vec![
            ((1, 20), (1, 10)),
            ((21, 40), (6, 15)),
            ((31, 50), (16, 25)),
            ((51, 70), (21, 30)),
        ]
    );
}

#[test]
fn rectangles_are_contiguous_blocks() {
    let g = null_layout(5, 300, 250).unwrap();
    for (rows, cols) in g.rectangles() {
        assert!(rows.windows(2).all(|w| w[1] == w[0] + 1));
        assert!(cols.windows(2).all(|w| w[1] == w[0] + 1));
    }
}

#[test]
fn infeasible_sizes() {
    assert!(matches!(
        null_layout(3, 5, 5),
        Err(Error::LayoutInfeasible { .. })
    ));
    assert!(matches!(
        null_layout(3, 500, 5),
        Err(Error::LayoutInfeasible { .. })
    ));
}

#[test]
fn interpolated_families() {
    let b = [2.0, 5.0, 6.0, 7.0];
    let shrunk = interpolated_means(&b, 4, 5.0).unwrap();
    let want = [3.2, 5.0, 5.6, 6.2];
    for (x, y) in shrunk.iter().zip(want) {
        assert!((x - y).abs() < 1e-12);
    }
    let Distribution::Poisson { b } = Distribution::poisson_default().interpolated(10).unwrap()
    else {
        panic!()
    };
    assert_eq!(b, vec![5.0; 4]);
}

fn group_moments(dist: Distribution, seed: u64) -> Vec<(f64, f64)> {
    let spec = GeneratorSpec {
        distribution: dist,
        layout: LayoutSpec::new(3, 700, 600),
        seed,
    };
    let (a, g) = generate(&spec).unwrap();
    let mut sums = vec![(0.0, 0.0, 0usize); g.k() + 1];
    for (&x, &k) in a.as_slice().iter().zip(g.as_slice()) {
        let s = &mut sums[k as usize];
        s.0 += x;
        s.1 += x * x;
        s.2 += 1;
    }
    sums.into_iter()
        .map(|(s, ss, c)| {
            let m = s / c as f64;
            (m, ss / c as f64 - m * m)
        })
        .collect()
}

#[test]
fn generator_moments() {
    // group sizes are at least 200 * 200 entries, so 5-sigma bounds are tight
    for (dist, means, vars) in [
        (
            Distribution::gaussian_default(),
            vec![0.2, 0.5, 0.6, 0.7],
            vec![
                0.03f64.powi(2),
                0.04f64.powi(2),
                0.06f64.powi(2),
                0.07f64.powi(2),
            ],
        ),
        (
            Distribution::bernoulli_default(),
            vec![0.2, 0.5, 0.6, 0.7],
            vec![0.16, 0.25, 0.24, 0.21],
        ),
        (
            Distribution::poisson_default(),
            vec![2.0, 5.0, 6.0, 7.0],
            vec![2.0, 5.0, 6.0, 7.0],
        ),
        (
            Distribution::Poisson {
                b: vec![40.0, 55.0, 3.0, 90.0],
            },
            vec![40.0, 55.0, 3.0, 90.0],
            vec![40.0, 55.0, 3.0, 90.0],
        ),
    ] {
        let m = group_moments(dist.clone(), 11);
        for (k, (mean, var)) in m.iter().enumerate() {
            let sd_of_mean = (vars[k] / 40_000.0).sqrt();
            assert!(
                (mean - means[k]).abs() < 5.0 * sd_of_mean,
                "{dist:?} group {k}: {mean}"
            );
            assert!(
                (var / vars[k] - 1.0).abs() < 0.05,
                "{dist:?} group {k}: var {var}"
            );
        }
    }
}

#[test]
fn bernoulli_values_are_binary() {
    let spec = GeneratorSpec {
        distribution: Distribution::bernoulli_default(),
        layout: LayoutSpec::new(3, 70, 60),
        seed: 1,
    };
    let (a, _) = generate(&spec).unwrap();
    assert!(a.as_slice().iter().all(|&x| x == 0.0 || x == 1.0));
}

#[test]
fn seed_changes_data() {
    let mk = |seed| GeneratorSpec {
        distribution: Distribution::gaussian_default(),
        layout: LayoutSpec::new(3, 70, 60),
        seed,
    };
    let (a, _) = generate(&mk(1)).unwrap();
    let (b, _) = generate(&mk(2)).unwrap();
    let (c, _) = generate(&mk(1)).unwrap();
    assert_ne!(a.as_slice(), b.as_slice());
    assert_eq!(a.as_slice(), c.as_slice());
}

#[test]
fn spec_round_trips_through_json() {
    let spec = GeneratorSpec {
        distribution: Distribution::gaussian_default(),
        layout: LayoutSpec::new(3, 70, 60),
        seed: u64::MAX,
    };
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<GeneratorSpec>(&text).unwrap(), spec);
}
