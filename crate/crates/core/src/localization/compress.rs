//! Row/column compression of the observed matrix into cell means and counts.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::ward::{ward_linkage, Dendrogram};
use crate::error::{Error, Result};
use crate::model::{BiclusterAssignment, ObservedMatrix};

/// `L1 x L2` matrix of cell means with per-cell entry counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedMatrix {
    pub a_comp: Array2<f64>,
    pub m_counts: Array2<usize>,
    pub row_cluster_of: Vec<usize>,
    pub col_cluster_of: Vec<usize>,
}

impl CompressedMatrix {
    /// Aggregates `a` over the given row and column cluster maps.
    pub fn from_maps(
        a: &ObservedMatrix,
        row_cluster_of: Vec<usize>,
        col_cluster_of: Vec<usize>,
    ) -> Result<Self> {
        let (n, p) = a.dim();
        if row_cluster_of.len() != n || col_cluster_of.len() != p {
            return Err(Error::InvalidConfig(
                "cluster maps do not match the matrix shape".into(),
            ));
        }
        let l1 = row_cluster_of.iter().max().map_or(0, |&m| m + 1);
        let l2 = col_cluster_of.iter().max().map_or(0, |&m| m + 1);
        let mut sums = Array2::<f64>::zeros((l1, l2));
        let mut counts = Array2::<usize>::zeros((l1, l2));
        for (i, row) in a.values().outer_iter().enumerate() {
            let h = row_cluster_of[i];
            for (j, &x) in row.iter().enumerate() {
                let hh = col_cluster_of[j];
                sums[[h, hh]] += x;
                counts[[h, hh]] += 1;
            }
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::InvalidConfig(
                "cluster maps leave an empty cell".into(),
            ));
        }
        let a_comp =
            Array2::from_shape_fn((l1, l2), |(h, hh)| sums[[h, hh]] / counts[[h, hh]] as f64);
        Ok(Self {
            a_comp,
            m_counts: counts,
            row_cluster_of,
            col_cluster_of,
        })
    }

    pub fn l1(&self) -> usize {
        self.a_comp.nrows()
    }

    pub fn l2(&self) -> usize {
        self.a_comp.ncols()
    }

    /// Number of entries of the original matrix, `n * p`.
    pub fn total_count(&self) -> usize {
        self.m_counts.iter().sum()
    }

    /// Expands a cell-level assignment to the original entries.
    pub fn expand(&self, g: &CompressedAssignment) -> Result<BiclusterAssignment> {
        if g.group_of_cell.dim() != self.a_comp.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.a_comp.dim(),
                actual: g.group_of_cell.dim(),
            });
        }
        let n = self.row_cluster_of.len();
        let p = self.col_cluster_of.len();
        let labels = Array2::from_shape_fn((n, p), |(i, j)| {
            g.group_of_cell[[self.row_cluster_of[i], self.col_cluster_of[j]]]
        });
        Ok(BiclusterAssignment::from_parts_unchecked(labels, g.k))
    }
}

/// Group index per compressed cell; same invariants as an entry-level
/// assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedAssignment {
    group_of_cell: Array2<u32>,
    k: usize,
}

impl CompressedAssignment {
    pub fn new(group_of_cell: Array2<u32>, k: usize) -> Result<Self> {
        // reuse the entry-level validation: rectangles, non-empty groups
        let checked = BiclusterAssignment::new(group_of_cell, k)?;
        Ok(Self {
            group_of_cell: checked.group_of().to_owned(),
            k,
        })
    }

    pub(crate) fn from_parts_unchecked(group_of_cell: Array2<u32>, k: usize) -> Self {
        Self { group_of_cell, k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn group_of_cell(&self) -> ArrayView2<'_, u32> {
        self.group_of_cell.view()
    }
}

/// Precomputed Ward hierarchies over the rows and columns of a matrix, so
/// compressions at several `(L1, L2)` reuse one clustering pass.
#[derive(Debug, Clone)]
pub struct RowColumnHierarchy {
    rows: Dendrogram,
    cols: Dendrogram,
}

impl RowColumnHierarchy {
    pub fn new(a: &ObservedMatrix) -> Self {
        let (n, p) = a.dim();
        let rows = ward_linkage(a.as_slice(), n, p);
        let transposed: Vec<f64> = a.values().t().iter().copied().collect();
        let cols = ward_linkage(&transposed, p, n);
        Self { rows, cols }
    }

    pub fn compress(&self, a: &ObservedMatrix, l1: usize, l2: usize) -> Result<CompressedMatrix> {
        let row_map = self.rows.cut(l1)?;
        let col_map = self.cols.cut(l2)?;
        CompressedMatrix::from_maps(a, row_map, col_map)
    }
}

/// Ward-clusters rows into `l1` and columns into `l2` groups and aggregates.
pub fn compress(a: &ObservedMatrix, l1: usize, l2: usize) -> Result<CompressedMatrix> {
    let (n, p) = a.dim();
    if l1 == 0 || l1 > n {
        return Err(Error::LTooLarge { l: l1, count: n });
    }
    if l2 == 0 || l2 > p {
        return Err(Error::LTooLarge { l: l2, count: p });
    }
    RowColumnHierarchy::new(a).compress(a, l1, l2)
}

/// Suggested cluster count `min(2^k0, len)`.
pub fn default_cluster_count(k0: usize, len: usize) -> usize {
    if k0 >= usize::BITS as usize - 1 {
        return len;
    }
    (1usize << k0).min(len)
}
