#![allow(dead_code)]

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randfnn::datasets::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dataset(rng: &mut ChaCha8Rng, rows: usize, dim: usize) -> Dataset<f64> {
    let inputs = (0..rows * dim).map(|_| rng.random::<f64>()).collect();
    let targets = (0..rows).map(|_| rng.random::<f64>()).collect();
    Dataset::new(inputs, dim, targets).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<f64> {
    Mat::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

/// k nearest rows by sorting every candidate on (distance, index).
pub fn full_sort_knn(data: &Dataset<f64>, anchor: usize, k: usize) -> Vec<usize> {
    let a = data.row(anchor);
    let mut all: Vec<(f64, usize)> = (0..data.len())
        .filter(|&j| j != anchor)
        .map(|j| (a.iter().zip(data.row(j)).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt(), j))
        .collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    all.truncate(k);
    all.into_iter().map(|(_, j)| j).collect()
}

/// Gaussian elimination with partial pivoting on a dense square system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Least squares through the normal equations `(X^T X) b = X^T y`.
pub fn normal_equations(design: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = design[0].len();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &t) in design.iter().zip(y) {
        for i in 0..p {
            xty[i] += row[i] * t;
            for j in 0..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    gauss_solve(xtx, xty)
}

/// max |A^T (A b - y)|
pub fn normal_residual(a: &Mat<f64>, b: &[f64], y: &[f64]) -> f64 {
    let r: Vec<f64> = (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * b[j]).sum::<f64>() - y[i]).collect();
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)] * r[i]).sum::<f64>().abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
