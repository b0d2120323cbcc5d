use serde::{Deserialize, Serialize};

use super::{add_uniform_noise, normalize_targets, Dataset, NoiseSpec, NormalizationRecord};
use crate::rng::uniform;
use crate::{derive_seed, Error, Result, Scalar, Seed};

/// `sin(20 exp(x)) x^2`
pub fn tf1<T: Scalar>(x: T) -> T {
    (T::of(20.0) * x.exp()).sin() * x * x
}

/// `tf1(x1) + tf1(x2)`
pub fn tf2<T: Scalar>(x1: T, x2: T) -> T {
    tf1(x1) + tf1(x2)
}

/// The two synthetic target functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetFunction {
    Tf1,
    Tf2,
}

impl TargetFunction {
    pub fn dim(self) -> usize {
        match self {
            TargetFunction::Tf1 => 1,
            TargetFunction::Tf2 => 2,
        }
    }

    pub fn eval<T: Scalar>(self, x: &[T]) -> T {
        match self {
            TargetFunction::Tf1 => tf1(x[0]),
            TargetFunction::Tf2 => tf2(x[0], x[1]),
        }
    }

    /// `num_points` inputs i.i.d. uniform on the unit cube with raw targets.
    pub fn sample<T: Scalar>(self, num_points: usize, seed: Seed) -> Result<Dataset<T>> {
        if num_points == 0 {
            return Err(Error::argument("num_points must be at least 1"));
        }
        let n = self.dim();
        let mut rng = seed.rng();
        let inputs: Vec<T> = (0..num_points * n).map(|_| T::of(uniform(&mut rng, 0.0, 1.0))).collect();
        let targets = inputs.chunks_exact(n).map(|x| self.eval(x)).collect();
        Dataset::new(inputs, n, targets)
    }

    pub fn name(self) -> &'static str {
        match self {
            TargetFunction::Tf1 => "tf1",
            TargetFunction::Tf2 => "tf2",
        }
    }
}

impl std::str::FromStr for TargetFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tf1" => Ok(TargetFunction::Tf1),
            "tf2" => Ok(TargetFunction::Tf2),
            other => Err(Error::argument(format!("unknown target function '{other}' (expected tf1 or tf2)"))),
        }
    }
}

pub fn generate_tf1<T: Scalar>(num_points: usize, seed: Seed) -> Result<Dataset<T>> {
    TargetFunction::Tf1.sample(num_points, seed)
}

pub fn generate_tf2<T: Scalar>(num_points: usize, seed: Seed) -> Result<Dataset<T>> {
    TargetFunction::Tf2.sample(num_points, seed)
}

/// Regular `points_per_axis x points_per_axis` lattice over `[0, 1]^2` with
/// noiseless raw `tf2` targets. Rows run with `x2` fastest.
pub fn generate_test_grid_2d<T: Scalar>(points_per_axis: usize) -> Result<Dataset<T>> {
    if points_per_axis < 2 {
        return Err(Error::argument("a grid needs at least 2 points per axis"));
    }
    let step = 1.0 / (points_per_axis - 1) as f64;
    let mut inputs = Vec::with_capacity(2 * points_per_axis * points_per_axis);
    let mut targets = Vec::with_capacity(points_per_axis * points_per_axis);
    for i in 0..points_per_axis {
        for j in 0..points_per_axis {
            let (x1, x2) = (T::of(i as f64 * step), T::of(j as f64 * step));
            inputs.extend([x1, x2]);
            targets.push(tf2(x1, x2));
        }
    }
    Dataset::new(inputs, 2, targets)
}

/// How the noiseless test set of a synthetic study is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "size")]
pub enum TestDesign {
    /// i.i.d. uniform points.
    Random(usize),
    /// Regular lattice with this many points per axis (2-D only).
    Grid(usize),
}

/// Where the training noise enters relative to target normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseOrder {
    /// Normalize the clean targets to `[0, 1]`, then add `U(-c, c)`; `c` is
    /// on the normalized scale. The protocol of the two-variable studies.
    AfterNormalization,
    /// Add `U(-c, c)` to the raw targets, then normalize the noisy targets;
    /// `c` is on the raw scale. The protocol of the single-variable study.
    BeforeNormalization,
}

impl NoiseOrder {
    /// The order each target function's published study used.
    pub fn standard_for(tf: TargetFunction) -> Self {
        match tf {
            TargetFunction::Tf1 => NoiseOrder::BeforeNormalization,
            TargetFunction::Tf2 => NoiseOrder::AfterNormalization,
        }
    }
}

/// Training and test sets of one synthetic study, plus the training
/// normalization both were mapped with.
#[derive(Debug, Clone)]
pub struct StudyData<T> {
    pub train: Dataset<T>,
    pub test: Dataset<T>,
    pub normalization: NormalizationRecord,
}

/// Builds a synthetic study: random training inputs with noisy targets
/// normalized to `[0, 1]` (in the given [`NoiseOrder`]), and a noiseless
/// test set mapped with the training normalization.
///
/// The input, noise and test streams are children of `seed`. The noise
/// stream does not depend on `c`, so studies that differ only in `c` share
/// their inputs and their unit noise draws.
pub fn synthetic_study<T: Scalar>(
    tf: TargetFunction,
    n_train: usize,
    noise: NoiseSpec,
    order: NoiseOrder,
    test: TestDesign,
    seed: Seed,
) -> Result<StudyData<T>> {
    let clean = tf.sample::<T>(n_train, derive_seed(seed, &[1]))?;
    let noise_seed = derive_seed(seed, &[2]);
    let (train, record) = match order {
        NoiseOrder::AfterNormalization => {
            let (normalized, record) = normalize_targets(&clean)?;
            (add_uniform_noise(&normalized, noise, noise_seed), record)
        }
        NoiseOrder::BeforeNormalization => normalize_targets(&add_uniform_noise(&clean, noise, noise_seed))?,
    };
    let raw_test = match (test, tf) {
        (TestDesign::Random(n), _) => tf.sample::<T>(n, derive_seed(seed, &[3]))?,
        (TestDesign::Grid(p), TargetFunction::Tf2) => generate_test_grid_2d(p)?,
        (TestDesign::Grid(_), TargetFunction::Tf1) => {
            return Err(Error::argument("grid test designs are defined for tf2 only"))
        }
    };
    Ok(StudyData { train, test: record.apply_to(&raw_test), normalization: record })
}

#[cfg(test)]
mod tests {
    use super::*;

    // sin(20 e), evaluated to 40 digits with an arbitrary precision library
    const SIN_20E: f64 = -0.818_365_688_467_858_937_429_255_940_953_563;

    #[test]
    fn tf1_known_values() {
        assert_eq!(tf1(0.0_f64), 0.0);
        assert!((tf1(1.0_f64) - SIN_20E).abs() < 1e-13);
    }

    #[test]
    fn tf2_known_values_and_symmetry() {
        assert_eq!(tf2(0.0_f64, 0.0), 0.0);
        assert!((tf2(1.0_f64, 1.0) - 2.0 * SIN_20E).abs() < 1e-13);
        for &(a, b) in &[(0.1, 0.7), (0.33, 0.99), (0.5, 0.0)] {
            assert_eq!(tf2(a, b), tf2(b, a));
        }
    }

    #[test]
    fn sampled_sets_have_expected_shape() {
        let d = generate_tf1::<f64>(5000, Seed(1)).unwrap();
        assert_eq!((d.len(), d.dim()), (5000, 1));
        assert!(d.inputs().iter().all(|&x| (0.0..1.0).contains(&x)));
        assert!(d.rows().zip(d.targets()).all(|(x, &y)| y == tf1(x[0])));
        let d2 = generate_tf2::<f64>(10, Seed(1)).unwrap();
        assert_eq!(d2.dim(), 2);
        assert!(generate_tf2::<f64>(0, Seed(1)).is_err());
        assert!(generate_tf1::<f64>(0, Seed(1)).is_err());
        assert_eq!(generate_tf2::<f64>(10, Seed(9)).unwrap(), generate_tf2::<f64>(10, Seed(9)).unwrap());
    }

    #[test]
    fn grid_layout() {
        let g = generate_test_grid_2d::<f64>(100).unwrap();
        assert_eq!(g.len(), 10_000);
        assert_eq!(g.row(1), &[0.0, 1.0 / 99.0]);
        let corners = generate_test_grid_2d::<f64>(2).unwrap();
        assert_eq!(corners.inputs(), &[0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        assert!(generate_test_grid_2d::<f64>(1).is_err());
    }

    #[test]
    fn study_test_set_uses_training_map() {
        let s = synthetic_study::<f64>(TargetFunction::Tf2, 500, NoiseSpec::new(0.0).unwrap(), NoiseOrder::AfterNormalization, TestDesign::Grid(5), Seed(2)).unwrap();
        let raw = generate_test_grid_2d::<f64>(5).unwrap();
        for (z, y) in s.test.targets().iter().zip(raw.targets()) {
            assert_eq!(*z, s.normalization.apply(*y));
        }
        assert!(synthetic_study::<f64>(TargetFunction::Tf1, 50, NoiseSpec::new(0.1).unwrap(), NoiseOrder::AfterNormalization, TestDesign::Grid(5), Seed(2)).is_err());
    }

    #[test]
    fn noise_stream_shared_across_bounds() {
        let a = synthetic_study::<f64>(TargetFunction::Tf1, 100, NoiseSpec::new(0.1).unwrap(), NoiseOrder::AfterNormalization, TestDesign::Random(10), Seed(4)).unwrap();
        let b = synthetic_study::<f64>(TargetFunction::Tf1, 100, NoiseSpec::new(0.2).unwrap(), NoiseOrder::AfterNormalization, TestDesign::Random(10), Seed(4)).unwrap();
        let clean = synthetic_study::<f64>(TargetFunction::Tf1, 100, NoiseSpec::new(0.0).unwrap(), NoiseOrder::AfterNormalization, TestDesign::Random(10), Seed(4)).unwrap();
        assert_eq!(a.train.inputs(), b.train.inputs());
        for ((ya, yb), y0) in a.train.targets().iter().zip(b.train.targets()).zip(clean.train.targets()) {
            assert!(((yb - y0) - 2.0 * (ya - y0)).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_before_normalization_keeps_unit_range() {
        let s = synthetic_study::<f64>(TargetFunction::Tf1, 500, NoiseSpec::new(0.2).unwrap(), NoiseOrder::BeforeNormalization, TestDesign::Random(50), Seed(6)).unwrap();
        let (lo, hi) = s.train.targets().iter().fold((f64::MAX, f64::MIN), |(l, h), &y| (l.min(y), h.max(y)));
        assert_eq!((lo, hi), (0.0, 1.0));
        let raw = generate_tf1::<f64>(500, derive_seed(Seed(6), &[1])).unwrap();
        // the record spans the noisy raw targets
        let (rlo, rhi) = raw.targets().iter().fold((f64::MAX, f64::MIN), |(l, h), &y| (l.min(y), h.max(y)));
        assert!(s.normalization.min >= rlo - 0.2 && s.normalization.min <= rlo + 0.2);
        assert!(s.normalization.max >= rhi - 0.2 && s.normalization.max <= rhi + 0.2);
    }
}
