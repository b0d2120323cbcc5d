//! Sample sets: construction, normalization, noise, splitting and
//! nearest-neighbor queries.

mod csv_io;
mod knn;
mod synthetic;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::uniform;
use crate::{Error, Result, Scalar, Seed};

pub use csv_io::{load_csv, read_csv, write_csv, ColumnSelector, CsvTable, InputScaling};
pub use knn::{k_nearest_neighbors, Neighborhood};
pub use synthetic::{
    generate_test_grid_2d, generate_tf1, generate_tf2, synthetic_study, tf1, tf2, NoiseOrder,
    StudyData, TargetFunction, TestDesign,
};

/// `N` input rows of dimension `n` with one scalar target each.
///
/// Inputs are stored row-major. Values are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    inputs: Vec<T>,
    targets: Vec<T>,
    dim: usize,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from row-major `inputs` of width `dim`.
    pub fn new(inputs: Vec<T>, dim: usize, targets: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::argument("input dimension must be at least 1"));
        }
        if targets.is_empty() {
            return Err(Error::argument("dataset needs at least one sample"));
        }
        if inputs.len() != targets.len() * dim {
            return Err(Error::dimension(format!(
                "{} input values do not form {} rows of width {dim}",
                inputs.len(),
                targets.len()
            )));
        }
        if let Some(pos) = inputs.iter().position(|v| !v.is_finite()) {
            return Err(Error::argument(format!(
                "non-finite input at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        if let Some(pos) = targets.iter().position(|v| !v.is_finite()) {
            return Err(Error::argument(format!("non-finite target at row {pos}")));
        }
        Ok(Dataset { inputs, targets, dim })
    }

    pub fn from_rows(rows: &[Vec<T>], targets: Vec<T>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::dimension("rows have differing lengths"));
        }
        Self::new(rows.concat(), dim, targets)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Input dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, index: usize) -> &[T] {
        &self.inputs[index * self.dim..(index + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.inputs.chunks_exact(self.dim)
    }

    pub fn target(&self, index: usize) -> T {
        self.targets[index]
    }

    pub fn inputs(&self) -> &[T] {
        &self.inputs
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    /// Same inputs, new targets.
    pub fn with_targets(&self, targets: Vec<T>) -> Result<Self> {
        if targets.len() != self.len() {
            return Err(Error::dimension(format!(
                "{} targets for {} rows",
                targets.len(),
                self.len()
            )));
        }
        Self::new(self.inputs.clone(), self.dim, targets)
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::argument(format!("row index {bad} out of range")));
        }
        let mut inputs = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            inputs.extend_from_slice(self.row(i));
        }
        let targets = indices.iter().map(|&i| self.targets[i]).collect();
        Self::new(inputs, self.dim, targets)
    }
}

/// Half-width `c` of the uniform noise interval `[-c, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    bound: f64,
}

impl NoiseSpec {
    pub fn new(bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(Error::argument(format!(
                "noise bound must be finite and >= 0, got {bound}"
            )));
        }
        Ok(NoiseSpec { bound })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

/// Affine target map `y -> (y - min) / (max - min)` fitted on one set and
/// reusable on another.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub min: f64,
    pub max: f64,
}

impl NormalizationRecord {
    pub fn apply<T: Scalar>(&self, y: T) -> T {
        (y - T::of(self.min)) / (T::of(self.max) - T::of(self.min))
    }

    pub fn invert<T: Scalar>(&self, y: T) -> T {
        y * (T::of(self.max) - T::of(self.min)) + T::of(self.min)
    }

    /// Maps every target of `data`. No clamping: values outside the fitted
    /// range land outside `[0, 1]`.
    pub fn apply_to<T: Scalar>(&self, data: &Dataset<T>) -> Dataset<T> {
        let targets = data.targets().iter().map(|&y| self.apply(y)).collect();
        Dataset { targets, ..data.clone() }
    }
}

/// Min-max normalizes the targets to `[0, 1]`.
pub fn normalize_targets<T: Scalar>(data: &Dataset<T>) -> Result<(Dataset<T>, NormalizationRecord)> {
    let (lo, hi) = data
        .targets()
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    if lo == hi {
        return Err(Error::DegenerateRange(lo.to_f64_lossy()));
    }
    let record = NormalizationRecord { min: lo.to_f64_lossy(), max: hi.to_f64_lossy() };
    Ok((record.apply_to(data), record))
}

/// Adds an independent `U(-c, c)` draw to every target.
pub fn add_uniform_noise<T: Scalar>(data: &Dataset<T>, spec: NoiseSpec, seed: Seed) -> Dataset<T> {
    if spec.bound == 0.0 {
        return data.clone();
    }
    let mut rng = seed.rng();
    let c = spec.bound;
    let targets = data
        .targets()
        .iter()
        .map(|&y| y + T::of(uniform(&mut rng, -c, c)))
        .collect();
    Dataset { targets, ..data.clone() }
}

/// Random partition into a training part of `round(fraction * N)` rows and a
/// test part holding the rest.
pub fn split_train_test<T: Scalar>(
    data: &Dataset<T>,
    train_fraction: f64,
    seed: Seed,
) -> Result<(Dataset<T>, Dataset<T>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::argument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = data.len();
    let n_train = (train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::argument(format!(
            "fraction {train_fraction} of {n} rows leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed.rng());
    let (train_idx, test_idx) = order.split_at(n_train);
    Ok((data.select(train_idx)?, data.select(test_idx)?))
}

/// Shuffled `folds`-way partition of `0..n`. Fold sizes differ by at most
/// one; the larger folds come first. Each fold is sorted ascending.
pub fn k_fold_indices(n: usize, folds: usize, seed: Seed) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::argument(format!("need at least 2 folds, got {folds}")));
    }
    if folds > n {
        return Err(Error::argument(format!("{folds} folds for only {n} samples")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed.rng());
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        let mut fold = order[start..start + size].to_vec();
        fold.sort_unstable();
        out.push(fold);
        start += size;
    }
    Ok(out)
}
