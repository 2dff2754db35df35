//! Largest eigenvalue of the Gram matrix `Z^T Z`.
//!
//! Lanczos with full reorthogonalization on the operator `v -> Z^T (Z v)`
//! (or `u -> Z (Z^T u)` when `Z` has fewer rows than columns, which shares
//! the nonzero spectrum). The Gram matrix is never formed. Ritz values of the
//! tridiagonal projection are found by Sturm-sequence bisection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ResidualMatrix;

pub const DEFAULT_TOL: f64 = 1e-10;

const START_SEED: u64 = 0x6c61_6e63_7a6f_7331;
const MAX_BASIS: usize = 320;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Largest eigenvalue of `Z^T Z`.
    pub lambda1: f64,
    /// Unit eigenvector of `Z^T Z` (length `p`), when requested.
    pub v1: Option<Vec<f64>>,
    /// Number of Gram-operator applications.
    pub iterations: usize,
    /// `||Z^T Z v - lambda1 v||` for the returned Ritz pair.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    /// Defaults to `10 * max(n, p)` operator applications.
    pub max_iter: Option<usize>,
    pub want_vector: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: None,
            want_vector: false,
        }
    }
}

/// Largest eigenvalue of `Z^T Z` to relative accuracy `tol`.
pub fn max_eigenvalue(z: &ResidualMatrix, tol: f64, max_iter: usize) -> Result<EigenResult> {
    max_eigenvalue_with(
        z,
        EigenOptions {
            tol,
            max_iter: Some(max_iter),
            want_vector: true,
        },
    )
}

pub fn max_eigenvalue_with(z: &ResidualMatrix, options: EigenOptions) -> Result<EigenResult> {
    gram_max_eigenvalue(z.as_slice(), z.nrows(), z.ncols(), options)
}

/// Same as [`max_eigenvalue_with`] on a raw row-major `n x p` slice.
pub fn gram_max_eigenvalue(
    data: &[f64],
    n: usize,
    p: usize,
    options: EigenOptions,
) -> Result<EigenResult> {
    assert_eq!(data.len(), n * p, "data length does not match shape");
    if !(options.tol > 0.0 && options.tol <= 1e-2) {
        return Err(Error::InvalidConfig(format!(
            "eigenvalue tolerance {} outside (0, 1e-2]",
            options.tol
        )));
    }
    let max_iter = options.max_iter.unwrap_or(10 * n.max(p)).max(1);
    let op = GramOperator::new(data, n, p);
    let ritz = lanczos(&op, options.tol, max_iter)?;

    let mut result = EigenResult {
        lambda1: ritz.value,
        v1: None,
        iterations: ritz.iterations,
        residual: ritz.residual,
    };
    if options.want_vector {
        let v = if op.transposed {
            // u is an eigenvector of Z Z^T; Z^T u is one of Z^T Z
            let mut v = vec![0.0; p];
            op.apply_zt(&ritz.vector, &mut v);
            let norm = dot(&v, &v).sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            } else {
                v[0] = 1.0;
            }
            let mut gv = vec![0.0; p];
            let mut tmp = vec![0.0; n];
            op.apply_z(&v, &mut tmp);
            op.apply_zt(&tmp, &mut gv);
            result.residual = residual_norm(&gv, &v, ritz.value);
            v
        } else {
            ritz.vector
        };
        result.v1 = Some(v);
    }
    Ok(result)
}

/// Sum of squared entries.
pub fn frobenius_norm_sq(z: &ResidualMatrix) -> f64 {
    z.as_slice().iter().map(|x| x * x).sum()
}

struct GramOperator<'a> {
    data: &'a [f64],
    n: usize,
    p: usize,
    /// Work with `Z Z^T` (dimension `n`) instead of `Z^T Z`.
    transposed: bool,
}

impl<'a> GramOperator<'a> {
    fn new(data: &'a [f64], n: usize, p: usize) -> Self {
        Self {
            data,
            n,
            p,
            transposed: n < p,
        }
    }

    fn dim(&self) -> usize {
        if self.transposed {
            self.n
        } else {
            self.p
        }
    }

    /// out = Z v
    fn apply_z(&self, v: &[f64], out: &mut [f64]) {
        for (row, o) in self.data.chunks_exact(self.p).zip(out.iter_mut()) {
            *o = dot(row, v);
        }
    }

    /// out = Z^T u
    fn apply_zt(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (row, &ui) in self.data.chunks_exact(self.p).zip(u) {
            if ui != 0.0 {
                axpy(ui, row, out);
            }
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        if self.transposed {
            scratch.resize(self.p, 0.0);
            self.apply_zt(x, scratch);
            self.apply_z(scratch, out);
        } else {
            scratch.resize(self.n, 0.0);
            self.apply_z(x, scratch);
            self.apply_zt(scratch, out);
        }
    }
}

struct RitzPair {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
    residual: f64,
}

fn lanczos(op: &GramOperator<'_>, tol: f64, max_iter: usize) -> Result<RitzPair> {
    let dim = op.dim();
    let cap = dim.min(MAX_BASIS);
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&mut start);

    let mut scratch = Vec::new();
    let mut w = vec![0.0; dim];
    let mut iterations = 0usize;

    loop {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(cap);
        let mut beta: Vec<f64> = Vec::with_capacity(cap);
        let mut prev_theta: Option<f64> = None;
        let mut scale = 0.0f64;

        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w, &mut scratch);
            iterations += 1;

            let a = dot(&basis[j], &w);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy(-c, q, &mut w);
                }
            }
            let b = dot(&w, &w).sqrt();
            alpha.push(a);
            scale = scale.max(a.abs() + b);

            let (theta, y) = tridiagonal_top_pair(&alpha, &beta);
            let estimate = b * y[j].abs();

            let breakdown = b <= 1e-13 * scale.max(f64::MIN_POSITIVE);
            let stable = prev_theta
                .map(|t| (theta - t).abs() <= tol * theta.abs())
                .unwrap_or(false);
            if breakdown || (stable && estimate <= tol * theta.abs()) {
                let vector = combine(&basis, &y);
                let mut gv = vec![0.0; dim];
                op.apply(&vector, &mut gv, &mut scratch);
                let residual = residual_norm(&gv, &vector, theta);
                return Ok(RitzPair {
                    value: theta.max(0.0),
                    vector,
                    iterations,
                    residual,
                });
            }
            if iterations >= max_iter {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: estimate,
                });
            }
            prev_theta = Some(theta);

            if basis.len() == cap {
                // explicit restart from the current Ritz vector
                start = combine(&basis, &y);
                normalize(&mut start);
                break;
            }
            beta.push(b);
            let next: Vec<f64> = w.iter().map(|x| x / b).collect();
            basis.push(next);
        }
    }
}

/// Largest eigenvalue and unit eigenvector of the symmetric tridiagonal
/// matrix with diagonal `alpha` and off-diagonal `beta`.
#[allow(clippy::needless_range_loop)]
fn tridiagonal_top_pair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    debug_assert!(beta.len() + 1 >= m);
    if m == 1 {
        return (alpha[0], vec![1.0]);
    }
    let off = |i: usize| beta[i];

    // Gershgorin interval
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r =
            if i > 0 { off(i - 1).abs() } else { 0.0 } + if i + 1 < m { off(i).abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // number of eigenvalues strictly below x
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0f64;
        for i in 0..m {
            let b2 = if i > 0 { off(i - 1) * off(i - 1) } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
    }
    let theta = hi;

    // inverse iteration on the positive definite (shift - T)
    let norm = alpha
        .iter()
        .map(|a| a.abs())
        .chain(beta.iter().map(|b| b.abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let shift = theta + 1e-13 * norm;
    let mut y = vec![1.0; m];
    for _ in 0..3 {
        y = solve_shifted(alpha, &beta[..m - 1], shift, &y);
        normalize(&mut y);
    }
    (theta, y)
}

/// Solves `(shift I - T) x = rhs` with the Thomas algorithm.
fn solve_shifted(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let mut diag: Vec<f64> = alpha.iter().map(|a| shift - a).collect();
    let mut x = rhs.to_vec();
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 1..m {
        if diag[i - 1].abs() < tiny {
            diag[i - 1] = tiny;
        }
        let factor = -beta[i - 1] / diag[i - 1];
        diag[i] -= factor * -beta[i - 1];
        x[i] -= factor * x[i - 1];
    }
    if diag[m - 1].abs() < tiny {
        diag[m - 1] = tiny;
    }
    x[m - 1] /= diag[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (x[i] + beta[i] * x[i + 1]) / diag[i];
    }
    x
}

fn combine(basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; basis[0].len()];
    for (q, &c) in basis.iter().zip(y) {
        axpy(c, q, &mut v);
    }
    normalize(&mut v);
    v
}

fn residual_norm(gv: &[f64], v: &[f64], theta: f64) -> f64 {
    gv.iter()
        .zip(v)
        .map(|(g, x)| (g - theta * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
