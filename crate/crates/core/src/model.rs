//! Observed matrix, bicluster assignments and group-wise standardization.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Groups whose sample standard deviation falls below this are treated as
/// constant.
pub const DEGENERATE_STD: f64 = 1e-12;

/// A dense real `n x p` data matrix with optional row and column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedMatrix {
    values: Array2<f64>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl ObservedMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (n, p) = values.dim();
        if n < 2 || p < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 rows and 2 columns, got {n}x{p}"
            )));
        }
        if let Some((idx, v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "entry {idx:?} is not finite ({v})"
            )));
        }
        Ok(Self {
            values: values.as_standard_layout().into_owned(),
            row_labels: None,
            col_labels: None,
        })
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        let values = Array2::from_shape_vec((n, p), data)
            .map_err(|e| Error::InvalidMatrix(e.to_string()))?;
        Self::new(values)
    }

    pub fn with_labels(
        mut self,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(rows) = &row_labels {
            if rows.len() != self.nrows() {
                return Err(Error::InvalidMatrix(format!(
                    "{} row labels for {} rows",
                    rows.len(),
                    self.nrows()
                )));
            }
        }
        if let Some(cols) = &col_labels {
            if cols.len() != self.ncols() {
                return Err(Error::InvalidMatrix(format!(
                    "{} column labels for {} columns",
                    cols.len(),
                    self.ncols()
                )));
            }
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    /// Row-major contiguous storage.
    pub fn as_slice(&self) -> &[f64] {
        self.values
            .as_slice()
            .expect("observed matrix is stored in standard layout")
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }
}

/// Per-entry group index: 0 is the background, `1..=k` are biclusters.
///
/// Every bicluster is a non-empty combinatorial submatrix `I_k x J_k` and the
/// background is non-empty. The background itself need not be rectangular.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiclusterAssignment {
    group_of: Array2<u32>,
    k: usize,
}

impl BiclusterAssignment {
    /// Validates and wraps a dense label matrix with `k` biclusters.
    pub fn new(group_of: Array2<u32>, k: usize) -> Result<Self> {
        let group_of = group_of.as_standard_layout().into_owned();
        let mut counts = vec![0usize; k + 1];
        for &g in group_of.iter() {
            let g = g as usize;
            if g > k {
                return Err(Error::InvalidAssignment(format!(
                    "group index {g} exceeds K = {k}"
                )));
            }
            counts[g] += 1;
        }
        if counts[0] == 0 {
            return Err(Error::EmptyBackground);
        }
        if let Some(empty) = (1..=k).find(|&g| counts[g] == 0) {
            return Err(Error::EmptyGroup(empty));
        }
        let assignment = Self { group_of, k };
        for (idx, (rows, cols)) in assignment.rectangles().iter().enumerate() {
            if rows.len() * cols.len() != counts[idx + 1] {
                return Err(Error::InvalidAssignment(format!(
                    "group {} is not a submatrix",
                    idx + 1
                )));
            }
        }
        Ok(assignment)
    }

    /// Infers `k` as the largest label present.
    pub fn from_labels(group_of: Array2<u32>) -> Result<Self> {
        let k = group_of.iter().copied().max().unwrap_or(0) as usize;
        Self::new(group_of, k)
    }

    /// The single-group model: every entry is background.
    pub fn background(n: usize, p: usize) -> Self {
        Self {
            group_of: Array2::zeros((n, p)),
            k: 0,
        }
    }

    pub(crate) fn from_parts_unchecked(group_of: Array2<u32>, k: usize) -> Self {
        Self { group_of, k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> (usize, usize) {
        self.group_of.dim()
    }

    pub fn group_of(&self) -> ArrayView2<'_, u32> {
        self.group_of.view()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.group_of[[i, j]] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        self.group_of
            .as_slice()
            .expect("assignment is stored in standard layout")
    }

    /// Entry count per group, background first.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k + 1];
        for &g in self.group_of.iter() {
            counts[g as usize] += 1;
        }
        counts
    }

    /// Row and column index sets `(I_k, J_k)` for `k = 1..=K`, ascending.
    pub fn rectangles(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let (n, p) = self.dim();
        let mut row_hit = vec![vec![false; n]; self.k];
        let mut col_hit = vec![vec![false; p]; self.k];
        for ((i, j), &g) in self.group_of.indexed_iter() {
            if g > 0 {
                row_hit[g as usize - 1][i] = true;
                col_hit[g as usize - 1][j] = true;
            }
        }
        let collect = |hits: &[bool]| {
            hits.iter()
                .enumerate()
                .filter_map(|(i, &h)| h.then_some(i))
                .collect::<Vec<_>>()
        };
        row_hit
            .iter()
            .zip(&col_hit)
            .map(|(r, c)| (collect(r), collect(c)))
            .collect()
    }
}

/// Builds an assignment with group `k` = `rects[k - 1]` and the remainder as
/// background.
pub fn assignment_from_rectangles(
    n: usize,
    p: usize,
    rects: &[(Vec<usize>, Vec<usize>)],
) -> Result<BiclusterAssignment> {
    let mut group_of = Array2::<u32>::zeros((n, p));
    for (idx, (rows, cols)) in rects.iter().enumerate() {
        let k = idx + 1;
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::EmptyRectangle(k));
        }
        if let Some(&i) = rows.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidAssignment(format!(
                "rectangle {k}: row {i} out of range for {n} rows"
            )));
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= p) {
            return Err(Error::InvalidAssignment(format!(
                "rectangle {k}: column {j} out of range for {p} columns"
            )));
        }
        for &i in rows {
            for &j in cols {
                let cell = &mut group_of[[i, j]];
                if *cell != 0 && *cell as usize != k {
                    return Err(Error::Overlap {
                        entry: (i, j),
                        first: *cell as usize,
                        second: k,
                    });
                }
                *cell = k as u32;
            }
        }
    }
    if group_of.iter().all(|&g| g != 0) {
        return Err(Error::EmptyBackground);
    }
    Ok(BiclusterAssignment::from_parts_unchecked(
        group_of,
        rects.len(),
    ))
}

/// Sample mean, biased standard deviation and entry count per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub count: Vec<usize>,
}

impl GroupStats {
    pub fn num_groups(&self) -> usize {
        self.count.len()
    }

    /// Raw statistics without the degeneracy check.
    fn compute(a: &ObservedMatrix, g: &BiclusterAssignment) -> Result<Self> {
        check_shape(a, g)?;
        let groups = g.k() + 1;
        let mut sum = vec![0.0; groups];
        let mut count = vec![0usize; groups];
        for (&x, &k) in a.as_slice().iter().zip(g.as_slice()) {
            sum[k as usize] += x;
            count[k as usize] += 1;
        }
        if let Some(empty) = count.iter().position(|&c| c == 0) {
            return Err(Error::EmptyGroup(empty));
        }
        let mean: Vec<f64> = sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect();
        let mut sq = vec![0.0; groups];
        for (&x, &k) in a.as_slice().iter().zip(g.as_slice()) {
            let d = x - mean[k as usize];
            sq[k as usize] += d * d;
        }
        let std = sq
            .iter()
            .zip(&count)
            .map(|(s, &c)| (s / c as f64).sqrt())
            .collect();
        Ok(Self { mean, std, count })
    }
}

/// Per-group mean, biased (divide-by-count) std and count.
pub fn compute_group_stats(a: &ObservedMatrix, g: &BiclusterAssignment) -> Result<GroupStats> {
    let stats = GroupStats::compute(a, g)?;
    if let Some(k) = stats.std.iter().position(|&s| s < DEGENERATE_STD) {
        return Err(Error::DegenerateGroup(k));
    }
    Ok(stats)
}

/// Standardized residual matrix `(A - P) / sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualMatrix {
    values: Array2<f64>,
}

impl ResidualMatrix {
    pub fn new(values: Array2<f64>) -> Self {
        Self {
            values: values.as_standard_layout().into_owned(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values
            .as_slice()
            .expect("residual matrix is stored in standard layout")
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StandardizeOptions {
    /// Floor applied to degenerate group stds instead of failing.
    pub std_floor: Option<f64>,
}

pub fn standardize(a: &ObservedMatrix, g: &BiclusterAssignment) -> Result<ResidualMatrix> {
    standardize_with(a, g, StandardizeOptions::default())
}

pub fn standardize_with(
    a: &ObservedMatrix,
    g: &BiclusterAssignment,
    options: StandardizeOptions,
) -> Result<ResidualMatrix> {
    let mut stats = GroupStats::compute(a, g)?;
    for (k, s) in stats.std.iter_mut().enumerate() {
        if *s < DEGENERATE_STD {
            match options.std_floor {
                Some(floor) if floor > 0.0 => *s = s.max(floor),
                _ => return Err(Error::DegenerateGroup(k)),
            }
        }
    }
    Ok(apply_standardization(a, g, &stats.mean, &stats.std))
}

/// Standardizes with known population means `b` and stds `s` (background
/// first).
pub fn standardize_population(
    a: &ObservedMatrix,
    g: &BiclusterAssignment,
    b: &[f64],
    s: &[f64],
) -> Result<ResidualMatrix> {
    check_shape(a, g)?;
    let groups = g.k() + 1;
    if b.len() != groups || s.len() != groups {
        return Err(Error::InvalidConfig(format!(
            "expected {groups} means and stds, got {} and {}",
            b.len(),
            s.len()
        )));
    }
    if let Some(k) = s.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveStd(k));
    }
    Ok(apply_standardization(a, g, b, s))
}

fn apply_standardization(
    a: &ObservedMatrix,
    g: &BiclusterAssignment,
    mean: &[f64],
    std: &[f64],
) -> ResidualMatrix {
    let data: Vec<f64> = a
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .map(|(&x, &k)| (x - mean[k as usize]) / std[k as usize])
        .collect();
    ResidualMatrix {
        values: Array2::from_shape_vec(a.dim(), data).expect("shape preserved"),
    }
}

fn check_shape(a: &ObservedMatrix, g: &BiclusterAssignment) -> Result<()> {
    if a.dim() != g.dim() {
        return Err(Error::ShapeMismatch {
            expected: a.dim(),
            actual: g.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(values: Array2<f64>) -> ObservedMatrix {
        ObservedMatrix::new(values).unwrap()
    }

    #[test]
    fn rejects_small_or_nonfinite() {
        assert!(ObservedMatrix::new(Array2::zeros((1, 3))).is_err());
        assert!(ObservedMatrix::new(array![[0.0, f64::NAN], [1.0, 2.0]]).is_err());
        assert!(ObservedMatrix::new(array![[0.0, f64::INFINITY], [1.0, 2.0]]).is_err());
    }

    #[test]
    fn constant_matrix_is_degenerate() {
        let a = matrix(array![[1.0, 1.0], [1.0, 1.0]]);
        let g = BiclusterAssignment::background(2, 2);
        assert!(matches!(
            compute_group_stats(&a, &g),
            Err(Error::DegenerateGroup(0))
        ));
    }

    #[test]
    fn two_value_stats() {
        let a = matrix(array![[0.0, 2.0], [0.0, 2.0]]);
        let g = BiclusterAssignment::background(2, 2);
        let stats = compute_group_stats(&a, &g).unwrap();
        assert_eq!(stats.mean, vec![1.0]);
        assert_eq!(stats.std, vec![1.0]);
        assert_eq!(stats.count, vec![4]);
        let z = standardize(&a, &g).unwrap();
        assert_eq!(z.values(), array![[-1.0, 1.0], [-1.0, 1.0]]);
    }

    #[test]
    fn planted_block_stats_match_direct_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut values = Array2::<f64>::zeros((4, 4));
        for ((i, j), v) in values.indexed_iter_mut() {
            let base = if i < 2 && j < 2 { 10.0 } else { 0.0 };
            *v = base + rng.random_range(-0.5..0.5);
        }
        let a = matrix(values.clone());
        let g = assignment_from_rectangles(4, 4, &[(vec![0, 1], vec![0, 1])]).unwrap();
        let stats = compute_group_stats(&a, &g).unwrap();

        // direct loop over each group's index set
        let mut sums = [0.0; 2];
        let mut counts = [0usize; 2];
        for i in 0..4 {
            for j in 0..4 {
                let k = usize::from(i < 2 && j < 2);
                sums[k] += values[[i, j]];
                counts[k] += 1;
            }
        }
        for k in 0..2 {
            let mean = sums[k] / counts[k] as f64;
            assert!((stats.mean[k] - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            assert_eq!(stats.count[k], counts[k]);
        }
        assert!((stats.mean[1] - 10.0).abs() < 0.5);
        assert!(stats.mean[0].abs() < 0.5);
    }

    #[test]
    fn hand_computed_residuals() {
        // group 1 = rows {0,1} x cols {0,1}: values 1,3,5,7 -> mean 4, var 5
        // background: 2,4,6,8,10 -> mean 6, var 8
        let a = matrix(array![[1.0, 3.0, 2.0], [5.0, 7.0, 4.0], [6.0, 8.0, 10.0]]);
        let g = assignment_from_rectangles(3, 3, &[(vec![0, 1], vec![0, 1])]).unwrap();
        let z = standardize(&a, &g).unwrap();
        let s1 = 5f64.sqrt();
        let s0 = 8f64.sqrt();
        let expected = array![
            [-3.0 / s1, -1.0 / s1, -4.0 / s0],
            [1.0 / s1, 3.0 / s1, -2.0 / s0],
            [0.0, 2.0 / s0, 4.0 / s0]
        ];
        for (x, y) in z.values().iter().zip(expected.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn std_floor_rescues_constant_group() {
        let a = matrix(array![[1.0, 1.0, 0.0], [1.0, 1.0, 3.0]]);
        let g = assignment_from_rectangles(2, 3, &[(vec![0, 1], vec![0, 1])]).unwrap();
        assert!(matches!(
            standardize(&a, &g),
            Err(Error::DegenerateGroup(1))
        ));
        let z = standardize_with(
            &a,
            &g,
            StandardizeOptions {
                std_floor: Some(1e-3),
            },
        )
        .unwrap();
        assert_eq!(z.values()[[0, 0]], 0.0);
    }

    #[test]
    fn population_standardization() {
        let a = matrix(array![[1.0, 1.0], [1.0, 4.0]]);
        let g = assignment_from_rectangles(2, 2, &[(vec![0], vec![0, 1])]).unwrap();
        let z = standardize_population(&a, &g, &[2.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(z.values(), array![[0.0, 0.0], [-1.0, 2.0]]);
        assert!(matches!(
            standardize_population(&a, &g, &[2.0, 1.0], &[1.0, 0.0]),
            Err(Error::NonPositiveStd(1))
        ));

        // sample parameters reproduce the estimated residuals
        let a = matrix(array![[1.0, 2.0], [3.0, 5.0]]);
        let g = BiclusterAssignment::background(2, 2);
        let stats = compute_group_stats(&a, &g).unwrap();
        let z1 = standardize(&a, &g).unwrap();
        let z2 = standardize_population(&a, &g, &stats.mean, &stats.std).unwrap();
        assert_eq!(z1, z2);
    }

    #[test]
    fn exact_population_gives_zero_residual() {
        let a = matrix(array![[1.0, 1.0], [1.0, 4.0]]);
        let g = assignment_from_rectangles(2, 2, &[(vec![1], vec![1])]).unwrap();
        let z = standardize_population(&a, &g, &[1.0, 4.0], &[0.5, 0.5]).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rectangles_construction() {
        let g = assignment_from_rectangles(4, 4, &[(vec![0, 1], vec![0, 1])]).unwrap();
        assert_eq!(g.counts(), vec![12, 4]);
        assert_eq!(g.rectangles(), vec![(vec![0, 1], vec![0, 1])]);

        let err =
            assignment_from_rectangles(4, 4, &[(vec![0, 1], vec![0, 1]), (vec![0], vec![0, 3])])
                .unwrap_err();
        assert!(matches!(
            err,
            Error::Overlap {
                entry: (0, 0),
                first: 1,
                second: 2
            }
        ));

        let err = assignment_from_rectangles(2, 2, &[(vec![0], vec![0, 1]), (vec![1], vec![0, 1])])
            .unwrap_err();
        assert!(matches!(err, Error::EmptyBackground));

        let err = assignment_from_rectangles(2, 2, &[(vec![], vec![0])]).unwrap_err();
        assert!(matches!(err, Error::EmptyRectangle(1)));
    }

    #[test]
    fn label_validation() {
        // L-shaped group 1 is not a submatrix
        let labels = array![[1u32, 1], [1, 0]];
        assert!(BiclusterAssignment::from_labels(labels).is_err());
        let labels = array![[1u32, 1], [2, 2]];
        assert!(matches!(
            BiclusterAssignment::from_labels(labels),
            Err(Error::EmptyBackground)
        ));
        let labels = array![[2u32, 0], [0, 0]];
        assert!(matches!(
            BiclusterAssignment::new(labels, 2),
            Err(Error::EmptyGroup(1))
        ));
    }
}
