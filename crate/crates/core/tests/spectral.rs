mod common;

use biclust_tw::model::ResidualMatrix;
use biclust_tw::spectral::{
    gram_max_eigenvalue, max_eigenvalue, max_eigenvalue_with, EigenOptions,
};
use biclust_tw::Error;
use common::{normal_matrix, rng};
use nalgebra::DMatrix;
use ndarray::Array2;
use rand::Rng;

fn dense_top(a: &[f64], n: usize, p: usize) -> (f64, nalgebra::DVector<f64>) {
    let m = DMatrix::from_row_slice(n, p, a);
    let eig = (m.transpose() * &m).symmetric_eigen();
    let idx = eig.eigenvalues.imax();
    (
        eig.eigenvalues[idx],
        eig.eigenvectors.column(idx).into_owned(),
    )
}

#[test]
fn matches_dense_eigendecomposition() {
    let mut r = rng(1);
    for _ in 0..60 {
        let n = r.random_range(2..=60);
        let p = r.random_range(2..=60);
        let a = normal_matrix(n, p, &mut r);
        let z = ResidualMatrix::new(a.values().to_owned());
        let got = max_eigenvalue(&z, 1e-10, 100_000).unwrap();
        let (want, vec) = dense_top(a.as_slice(), n, p);
        assert!(((got.lambda1 - want) / want).abs() < 1e-8, "{n}x{p}");
        let v = got.v1.expect("vector requested");
        assert_eq!(v.len(), p);
        let overlap: f64 = v.iter().zip(vec.iter()).map(|(x, y)| x * y).sum();
        assert!(overlap.abs() > 1.0 - 1e-6, "{n}x{p}: overlap {overlap}");
    }
}

#[test]
fn low_rank_and_wide_matrices() {
    // rank one: u v^T has top eigenvalue |u|^2 |v|^2
    let (n, p) = (30, 80);
    let u: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
    let v: Vec<f64> = (0..p).map(|j| (j as f64 * 0.7).cos()).collect();
    let data = Array2::from_shape_fn((n, p), |(i, j)| u[i] * v[j]);
    let want = u.iter().map(|x| x * x).sum::<f64>() * v.iter().map(|x| x * x).sum::<f64>();
    let got = max_eigenvalue(&ResidualMatrix::new(data), 1e-10, 10_000).unwrap();
    assert!(((got.lambda1 - want) / want).abs() < 1e-10);
}

#[test]
fn repeated_top_eigenvalue() {
    let mut data = Array2::zeros((4, 4));
    data[[0, 0]] = 2.0;
    data[[1, 1]] = 2.0;
    data[[2, 2]] = 1.0;
    let got = max_eigenvalue(&ResidualMatrix::new(data), 1e-12, 1000).unwrap();
    assert!((got.lambda1 - 4.0).abs() < 1e-10);
}

#[test]
fn deterministic_across_calls() {
    let mut r = rng(5);
    let a = normal_matrix(50, 40, &mut r);
    let x = gram_max_eigenvalue(a.as_slice(), 50, 40, EigenOptions::default()).unwrap();
    let y = gram_max_eigenvalue(a.as_slice(), 50, 40, EigenOptions::default()).unwrap();
    assert_eq!(x.lambda1.to_bits(), y.lambda1.to_bits());
    assert_eq!(x.iterations, y.iterations);
}

#[test]
fn iteration_cap_reports_no_convergence() {
    let mut r = rng(9);
    let a = normal_matrix(80, 80, &mut r);
    let z = ResidualMatrix::new(a.values().to_owned());
    let err = max_eigenvalue_with(
        &z,
        EigenOptions {
            tol: 1e-10,
            max_iter: Some(2),
            want_vector: false,
        },
    )
    .unwrap_err();
    assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }));
    assert_eq!(err.exit_code(), 4);
}
