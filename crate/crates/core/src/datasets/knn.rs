use std::cmp::Ordering;

use super::Dataset;
use crate::{Error, Result, Scalar};

/// An anchor row and its `k` nearest neighbors.
///
/// Members are ordered by increasing Euclidean distance to the anchor, ties
/// by ascending row index. The anchor itself is never a member.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood<T> {
    pub anchor_index: usize,
    pub anchor: Vec<T>,
    pub anchor_target: T,
    pub member_indices: Vec<usize>,
    /// Row-major member inputs, `k x n`.
    pub member_inputs: Vec<T>,
    pub member_targets: Vec<T>,
}

impl<T: Scalar> Neighborhood<T> {
    pub fn k(&self) -> usize {
        self.member_indices.len()
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn member(&self, j: usize) -> &[T] {
        let n = self.dim();
        &self.member_inputs[j * n..(j + 1) * n]
    }

    /// Anchor followed by members: the `k + 1` points of the neighborhood.
    pub fn points(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        std::iter::once((self.anchor.as_slice(), self.anchor_target))
            .chain((0..self.k()).map(move |j| (self.member(j), self.member_targets[j])))
    }
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Exact brute-force `k`-nearest-neighbor query around row `anchor_index`.
///
/// Requires `n <= k <= N - 1`: an affine fit in `n` inputs needs `n + 1`
/// points, and the anchor is excluded from its own neighbors.
pub fn k_nearest_neighbors<T: Scalar>(data: &Dataset<T>, anchor_index: usize, k: usize) -> Result<Neighborhood<T>> {
    let n_rows = data.len();
    if anchor_index >= n_rows {
        return Err(Error::argument(format!("anchor index {anchor_index} out of range for {n_rows} rows")));
    }
    if k < data.dim() {
        return Err(Error::argument(format!(
            "k = {k} neighbors is fewer than the input dimension {}",
            data.dim()
        )));
    }
    if k >= n_rows {
        return Err(Error::argument(format!("k = {k} neighbors needs more than {n_rows} rows")));
    }
    let anchor = data.row(anchor_index);
    let mut candidates: Vec<(T, usize)> = (0..n_rows)
        .filter(|&j| j != anchor_index)
        .map(|j| (squared_distance(anchor, data.row(j)), j))
        .collect();
    let order = |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1));
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, order);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(order);

    let member_indices: Vec<usize> = candidates.iter().map(|&(_, j)| j).collect();
    let mut member_inputs = Vec::with_capacity(k * data.dim());
    for &j in &member_indices {
        member_inputs.extend_from_slice(data.row(j));
    }
    Ok(Neighborhood {
        anchor_index,
        anchor: anchor.to_vec(),
        anchor_target: data.target(anchor_index),
        member_targets: member_indices.iter().map(|&j| data.target(j)).collect(),
        member_indices,
        member_inputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Dataset<f64> {
        Dataset::new(xs.to_vec(), 1, xs.iter().map(|x| 10.0 * x).collect()).unwrap()
    }

    #[test]
    fn one_dimensional_example() {
        let d = line(&[0.0, 0.1, 0.2, 0.9]);
        let nb = k_nearest_neighbors(&d, 1, 2).unwrap();
        let mut members = nb.member_indices.clone();
        members.sort_unstable();
        assert_eq!(members, vec![0, 2]);
        assert_eq!(nb.anchor, vec![0.1]);
        assert_eq!(nb.anchor_target, 1.0);
        assert_eq!(nb.points().count(), 3);
    }

    #[test]
    fn ties_break_by_index() {
        let d = line(&[0.5, 0.25, 0.75, 0.0, 1.0]);
        let nb = k_nearest_neighbors(&d, 0, 3).unwrap();
        assert_eq!(nb.member_indices, vec![1, 2, 3]);
    }

    #[test]
    fn anchor_excluded_even_with_duplicates() {
        let d = line(&[0.2, 0.2, 0.2, 0.8]);
        for a in 0..3 {
            let nb = k_nearest_neighbors(&d, a, 2).unwrap();
            assert!(!nb.member_indices.contains(&a));
        }
    }

    #[test]
    fn argument_checks() {
        let d = Dataset::new(vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2, vec![0.0; 4]).unwrap();
        assert!(k_nearest_neighbors(&d, 0, 1).is_err());
        assert!(k_nearest_neighbors(&d, 0, 4).is_err());
        assert!(k_nearest_neighbors(&d, 4, 2).is_err());
        assert_eq!(k_nearest_neighbors(&d, 0, 3).unwrap().k(), 3);
    }
}
