//! Agglomerative clustering with Ward linkage.
//!
//! Squared Euclidean dissimilarities are updated with the Lance-Williams
//! recurrence and merged with the nearest-neighbor-chain algorithm, which for
//! a reducible linkage such as Ward yields the same hierarchy as greedy
//! closest-pair merging in `O(n^2)` time. Ties are broken towards the lowest
//! index.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Representative points of the two merged clusters.
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// Full merge history over `count` points, sorted by height.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    count: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Flat clustering into `l` clusters, labelled `0..l` in order of each
    /// cluster's smallest member.
    pub fn cut(&self, l: usize) -> Result<Vec<usize>> {
        if l == 0 || l > self.count {
            return Err(Error::LTooLarge {
                l,
                count: self.count,
            });
        }
        let mut parent: Vec<usize> = (0..self.count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.merges[..self.count - l] {
            let ra = find(&mut parent, m.a);
            let rb = find(&mut parent, m.b);
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
        let mut label_of_root = vec![usize::MAX; self.count];
        let mut next = 0;
        let mut labels = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let r = find(&mut parent, i);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            labels.push(label_of_root[r]);
        }
        debug_assert_eq!(next, l);
        Ok(labels)
    }
}

/// Ward hierarchy of `count` points stored row-major with `dim` coordinates.
pub fn ward_linkage(points: &[f64], count: usize, dim: usize) -> Dendrogram {
    assert_eq!(
        points.len(),
        count * dim,
        "point buffer does not match shape"
    );
    if count <= 1 {
        return Dendrogram {
            count,
            merges: Vec::new(),
        };
    }
    let mut dist = Condensed::squared_euclidean(points, count, dim);
    let mut size = vec![1usize; count];
    let mut active = vec![true; count];
    let mut remaining = count;
    let mut chain: Vec<usize> = Vec::with_capacity(count);
    let mut merges = Vec::with_capacity(count - 1);

    while remaining > 1 {
        if chain.is_empty() {
            chain.push(active.iter().position(|&a| a).expect("active cluster"));
        }
        let (a, b) = loop {
            let a = *chain.last().unwrap();
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            let mut best = prev;
            let mut best_d = prev.map_or(f64::INFINITY, |p| dist.get(a, p));
            for c in (0..count).filter(|&c| active[c] && c != a) {
                let d = dist.get(a, c);
                if d < best_d {
                    best_d = d;
                    best = Some(c);
                }
            }
            let b = best.expect("at least two active clusters");
            if Some(b) == prev {
                chain.pop();
                chain.pop();
                break (a, b);
            }
            chain.push(b);
        };

        let height = dist.get(a, b);
        let (keep, drop) = if a < b { (a, b) } else { (b, a) };
        let (na, nb) = (size[keep] as f64, size[drop] as f64);
        for c in (0..count).filter(|&c| active[c] && c != keep && c != drop) {
            let nc = size[c] as f64;
            let updated = ((na + nc) * dist.get(keep, c) + (nb + nc) * dist.get(drop, c)
                - nc * height)
                / (na + nb + nc);
            dist.set(keep, c, updated);
        }
        size[keep] += size[drop];
        active[drop] = false;
        remaining -= 1;
        merges.push(Merge {
            a: keep,
            b: drop,
            height,
        });
    }

    // stable: equal heights keep discovery order, which respects nesting
    merges.sort_by(|x, y| x.height.total_cmp(&y.height));
    Dendrogram { count, merges }
}

/// Ward clustering of `vectors` into `l` clusters.
pub fn ward_cluster(vectors: &[Vec<f64>], l: usize) -> Result<Vec<usize>> {
    if l == 0 || l > vectors.len() {
        return Err(Error::LTooLarge {
            l,
            count: vectors.len(),
        });
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::InvalidConfig(
            "all vectors must have the same length".into(),
        ));
    }
    let flat: Vec<f64> = vectors.iter().flatten().copied().collect();
    ward_linkage(&flat, vectors.len(), dim).cut(l)
}

struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    fn squared_euclidean(points: &[f64], n: usize, dim: usize) -> Self {
        let mut data = vec![0.0; n * (n - 1) / 2];
        let mut idx = 0;
        for i in 0..n {
            let xi = &points[i * dim..(i + 1) * dim];
            for j in i + 1..n {
                let xj = &points[j * dim..(j + 1) * dim];
                data[idx] = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
                idx += 1;
            }
        }
        Self { n, data }
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.data[k] = v;
    }
}
