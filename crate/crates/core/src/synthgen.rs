//! Synthetic matrices with overlapping-row/column (non-bi-disjoint) bicluster
//! layouts under Gaussian, Bernoulli and Poisson noise.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::EntropyKind;
use crate::model::{assignment_from_rectangles, BiclusterAssignment, ObservedMatrix};

/// Staircase layout of `k` biclusters in an `n x p` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutSpec {
    pub k: usize,
    pub n: usize,
    pub p: usize,
}

impl LayoutSpec {
    pub fn new(k: usize, n: usize, p: usize) -> Self {
        Self { k, n, p }
    }

    /// Number of row blocks, `(3K + 4 + K mod 2) / 2`.
    pub fn row_blocks(&self) -> usize {
        (3 * self.k + 4 + self.k % 2) / 2
    }

    /// Number of column blocks, `(3K + 4 - K mod 2) / 2`.
    pub fn col_blocks(&self) -> usize {
        (3 * self.k + 4 - self.k % 2) / 2
    }

    pub fn row_block_size(&self) -> usize {
        self.n / self.row_blocks()
    }

    pub fn col_block_size(&self) -> usize {
        self.p / self.col_blocks()
    }

    /// 0-based half-open row and column ranges of bicluster `k` (1-based).
    pub fn bicluster_ranges(&self, k: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        assert!(k >= 1 && k <= self.k);
        let row_offset = (3 * k - 2 - k % 2) / 2;
        let col_offset = (3 * k + k % 2 - 4) / 2;
        let n1 = self.row_block_size();
        let p1 = self.col_block_size();
        (
            row_offset * n1..(row_offset + 2) * n1,
            col_offset * p1..(col_offset + 2) * p1,
        )
    }
}

/// The null assignment of the staircase layout.
pub fn null_layout(k: usize, n: usize, p: usize) -> Result<BiclusterAssignment> {
    let spec = LayoutSpec::new(k, n, p);
    let infeasible = Error::LayoutInfeasible { k, n, p };
    if k == 0 || n < 2 || p < 2 || spec.row_block_size() == 0 || spec.col_block_size() == 0 {
        return Err(infeasible);
    }
    let rects: Vec<(Vec<usize>, Vec<usize>)> = (1..=k)
        .map(|b| {
            let (rows, cols) = spec.bicluster_ranges(b);
            (rows.collect(), cols.collect())
        })
        .collect();
    assignment_from_rectangles(n, p, &rects).map_err(|_| infeasible)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Gaussian { b: Vec<f64>, s: Vec<f64> },
    Bernoulli { b: Vec<f64> },
    Poisson { b: Vec<f64> },
}

impl Distribution {
    /// Background-first means (0.2, 0.5, 0.6, 0.7), stds (0.03, 0.04, 0.06, 0.07).
    pub fn gaussian_default() -> Self {
        Distribution::Gaussian {
            b: vec![0.2, 0.5, 0.6, 0.7],
            s: vec![0.03, 0.04, 0.06, 0.07],
        }
    }

    pub fn bernoulli_default() -> Self {
        Distribution::Bernoulli {
            b: vec![0.2, 0.5, 0.6, 0.7],
        }
    }

    pub fn poisson_default() -> Self {
        Distribution::Poisson {
            b: vec![2.0, 5.0, 6.0, 7.0],
        }
    }

    /// Default parameters for `k` biclusters: the background entry of the
    /// preset followed by its three bicluster levels, repeated cyclically.
    /// Equals the preset for `k = 3`.
    pub fn preset(kind: EntropyKind, k: usize) -> Self {
        let base = match kind {
            EntropyKind::Gaussian => Self::gaussian_default(),
            EntropyKind::Bernoulli => Self::bernoulli_default(),
            EntropyKind::Poisson => Self::poisson_default(),
        };
        let cycle = |v: &[f64]| -> Vec<f64> {
            std::iter::once(v[0])
                .chain((0..k).map(|i| v[1 + i % (v.len() - 1)]))
                .collect()
        };
        match base {
            Distribution::Gaussian { b, s } => Distribution::Gaussian {
                b: cycle(&b),
                s: cycle(&s),
            },
            Distribution::Bernoulli { b } => Distribution::Bernoulli { b: cycle(&b) },
            Distribution::Poisson { b } => Distribution::Poisson { b: cycle(&b) },
        }
    }

    pub fn means(&self) -> &[f64] {
        match self {
            Distribution::Gaussian { b, .. }
            | Distribution::Bernoulli { b }
            | Distribution::Poisson { b } => b,
        }
    }

    /// Population standard deviation per group.
    pub fn stds(&self) -> Vec<f64> {
        match self {
            Distribution::Gaussian { s, .. } => s.clone(),
            Distribution::Bernoulli { b } => b.iter().map(|&q| (q * (1.0 - q)).sqrt()).collect(),
            Distribution::Poisson { b } => b.iter().map(|&m| m.sqrt()).collect(),
        }
    }

    /// Shrink center for the interpolated mean family.
    pub fn interpolation_center(&self) -> f64 {
        match self {
            Distribution::Poisson { .. } => 5.0,
            _ => 0.5,
        }
    }

    /// Same family with means replaced by the `t`-th interpolated vector.
    pub fn interpolated(&self, t: u32) -> Result<Self> {
        let b = interpolated_means(self.means(), t, self.interpolation_center())?;
        Ok(match self {
            Distribution::Gaussian { s, .. } => Distribution::Gaussian { b, s: s.clone() },
            Distribution::Bernoulli { .. } => Distribution::Bernoulli { b },
            Distribution::Poisson { .. } => Distribution::Poisson { b },
        })
    }

    fn validate(&self, k: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let b = self.means();
        if b.len() != k + 1 {
            return bad(format!("expected {} group means, got {}", k + 1, b.len()));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return bad("group means must be finite".into());
        }
        match self {
            Distribution::Gaussian { s, .. } => {
                if s.len() != k + 1 {
                    return bad(format!("expected {} group stds, got {}", k + 1, s.len()));
                }
                if s.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                    return bad("group stds must be positive".into());
                }
            }
            Distribution::Bernoulli { b } => {
                if b.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    return bad("Bernoulli means must lie in [0, 1]".into());
                }
            }
            Distribution::Poisson { b } => {
                if b.iter().any(|&v| !(v > 0.0)) {
                    return bad("Poisson means must be positive".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub distribution: Distribution,
    pub layout: LayoutSpec,
    pub seed: u64,
}

/// `(1 - t/10) (b - center) + center`, elementwise.
pub fn interpolated_means(b: &[f64], t: u32, center: f64) -> Result<Vec<f64>> {
    if t > 10 {
        return Err(Error::InvalidConfig(format!(
            "interpolation step {t} outside 0..=10"
        )));
    }
    let shrink = 1.0 - t as f64 / 10.0;
    Ok(b.iter().map(|&v| shrink * (v - center) + center).collect())
}

/// Draws a matrix from `spec` and returns it with its null assignment.
///
/// Entries are drawn in row-major order from ChaCha8 seeded with
/// `spec.seed`: Gaussian via the ziggurat standard normal, Bernoulli as
/// `u < b`, Poisson by CDF inversion for means below 30.
pub fn generate(spec: &GeneratorSpec) -> Result<(ObservedMatrix, BiclusterAssignment)> {
    let LayoutSpec { k, n, p } = spec.layout;
    spec.distribution.validate(k)?;
    let g = null_layout(k, n, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut data = Vec::with_capacity(n * p);
    match &spec.distribution {
        Distribution::Gaussian { b, s } => {
            for &grp in g.as_slice() {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(b[grp as usize] + s[grp as usize] * z);
            }
        }
        Distribution::Bernoulli { b } => {
            for &grp in g.as_slice() {
                let u: f64 = rng.random();
                data.push(if u < b[grp as usize] { 1.0 } else { 0.0 });
            }
        }
        Distribution::Poisson { b } => {
            let large: Vec<Option<Poisson<f64>>> = b
                .iter()
                .map(|&m| (m >= 30.0).then(|| Poisson::new(m).expect("positive mean")))
                .collect();
            for &grp in g.as_slice() {
                let grp = grp as usize;
                let x = match &large[grp] {
                    Some(dist) => dist.sample(&mut rng),
                    None => poisson_inversion(b[grp], &mut rng),
                };
                data.push(x);
            }
        }
    }
    let a = ObservedMatrix::new(Array2::from_shape_vec((n, p), data).expect("shape"))?;
    Ok((a, g))
}

fn poisson_inversion(mean: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut prob = (-mean).exp();
    let mut cdf = prob;
    while u > cdf && k < 1000 {
        k += 1;
        prob *= mean / k as f64;
        cdf += prob;
    }
    k as f64
}
