//! Generalized profile likelihood `F(g) = sum_k p_k f(mean_k)`.

use super::compress::{CompressedAssignment, CompressedMatrix};
use super::entropy::EntropyFn;
use crate::error::{Error, Result};
use crate::model::{BiclusterAssignment, ObservedMatrix};

/// Profile likelihood of an entry-level assignment.
pub fn profile_likelihood(
    a: &ObservedMatrix,
    g: &BiclusterAssignment,
    f: &EntropyFn,
) -> Result<f64> {
    if a.dim() != g.dim() {
        return Err(Error::ShapeMismatch {
            expected: a.dim(),
            actual: g.dim(),
        });
    }
    let groups = g.k() + 1;
    let mut sum = vec![0.0; groups];
    let mut count = vec![0usize; groups];
    for (&x, &k) in a.as_slice().iter().zip(g.as_slice()) {
        sum[k as usize] += x;
        count[k as usize] += 1;
    }
    let total = (a.nrows() * a.ncols()) as f64;
    combine(
        &sum,
        &count.iter().map(|&c| c as f64).collect::<Vec<_>>(),
        total,
        f,
    )
}

/// Profile likelihood evaluated on the compressed matrix; equals
/// [`profile_likelihood`] of the expanded assignment.
pub fn profile_likelihood_compressed(
    c: &CompressedMatrix,
    g: &CompressedAssignment,
    f: &EntropyFn,
) -> Result<f64> {
    if c.a_comp.dim() != g.group_of_cell().dim() {
        return Err(Error::ShapeMismatch {
            expected: c.a_comp.dim(),
            actual: g.group_of_cell().dim(),
        });
    }
    let groups = g.k() + 1;
    let mut weighted = vec![0.0; groups];
    let mut weight = vec![0.0; groups];
    for ((&x, &m), &k) in c
        .a_comp
        .iter()
        .zip(c.m_counts.iter())
        .zip(g.group_of_cell().iter())
    {
        weighted[k as usize] += m as f64 * x;
        weight[k as usize] += m as f64;
    }
    combine(&weighted, &weight, c.total_count() as f64, f)
}

fn combine(sum: &[f64], weight: &[f64], total: f64, f: &EntropyFn) -> Result<f64> {
    if let Some(k) = weight.iter().position(|&w| w == 0.0) {
        return Err(Error::EmptyGroup(k));
    }
    Ok(sum
        .iter()
        .zip(weight)
        .map(|(&s, &w)| (w / total) * f.eval(s / w))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::assignment_from_rectangles;
    use ndarray::{array, Array2};

    #[test]
    fn single_group_gaussian() {
        let a = ObservedMatrix::new(array![[1.0, 2.0], [3.0, 6.0]]).unwrap();
        let g = BiclusterAssignment::background(2, 2);
        let value = profile_likelihood(&a, &g, &EntropyFn::Gaussian).unwrap();
        assert_eq!(value, 3.0 * 3.0 / 2.0);
    }

    #[test]
    fn all_zero_bernoulli() {
        let a = ObservedMatrix::new(Array2::zeros((3, 4))).unwrap();
        let g = BiclusterAssignment::background(3, 4);
        let value = profile_likelihood(&a, &g, &EntropyFn::Bernoulli).unwrap();
        assert_eq!(value, EntropyFn::Bernoulli.eval(0.0));
        assert_eq!(value, 0.0);
    }

    #[test]
    fn two_groups_match_nested_loop() {
        let a = ObservedMatrix::new(array![
            [1.0, 2.0, 0.5, 0.0],
            [3.0, 4.0, 0.2, 0.1],
            [0.3, 0.0, 0.9, 1.5],
            [0.7, 0.4, 0.8, 0.6]
        ])
        .unwrap();
        let g = assignment_from_rectangles(4, 4, &[(vec![0, 1], vec![0, 1])]).unwrap();
        for f in [
            EntropyFn::Gaussian,
            EntropyFn::Bernoulli,
            EntropyFn::Poisson,
        ] {
            let mut expected = 0.0;
            for k in 0..2u32 {
                let mut s = 0.0;
                let mut c = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        if g.get(i, j) as u32 == k {
                            s += a.values()[[i, j]];
                            c += 1.0;
                        }
                    }
                }
                expected += c / 16.0 * f.eval(s / c);
            }
            let value = profile_likelihood(&a, &g, &f).unwrap();
            assert!((value - expected).abs() < 1e-12, "{f:?}");
        }
    }
}
