//! Experiment engine: scoring, repeated trials, cross-validated grid search,
//! sensitivity sweeps and method benchmarks.
//!
//! Every random stream is a child of the caller's master seed, addressed by
//! the work unit's coordinates (hyperparameters, node count, trial, fold).
//! Results therefore do not depend on execution order or on which other
//! cells were requested, and work units run in parallel on the rayon pool.

mod benchmark;
mod cv;
pub mod report;
mod stats;
mod sweep;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::generators::GeneratorConfig;
use crate::network::{fit_output_weights, predict};
use crate::{label_hash, Error, Result, Scalar, Seed};

pub use benchmark::{benchmark, BenchmarkEntry, BenchmarkResult, BenchmarkRow};
pub use cv::{grid_search_cv, GridSearchOutcome};
pub use stats::{summarize, Summary};
pub use sweep::{node_sensitivity_sweep, noise_sensitivity_sweep, Axis, SweepCell, SweepResult, SyntheticSetup};

/// Root-mean-square difference.
pub fn rmse<T: Scalar>(predicted: &[T], actual: &[T]) -> Result<T> {
    if predicted.len() != actual.len() {
        return Err(Error::dimension(format!(
            "{} predictions for {} targets",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Empty("rmse of zero samples".into()));
    }
    let sse = predicted.iter().zip(actual).fold(T::zero(), |acc, (&p, &a)| {
        let d = p - a;
        acc + d * d
    });
    Ok((sse / T::of(predicted.len() as f64)).sqrt())
}

/// One successful fit-and-score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: GeneratorConfig,
    pub m: usize,
    pub trial: usize,
    /// Validation fold for cross-validation runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
    pub seed: u64,
    pub train_rmse: f64,
    /// Test RMSE, or validation RMSE inside cross-validation.
    pub test_rmse: f64,
    pub wall_time_secs: f64,
}

impl TrialReport {
    pub fn method(&self) -> &'static str {
        self.config.method()
    }
}

/// A trial whose generation or solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub config: GeneratorConfig,
    pub m: usize,
    pub trial: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
    pub seed: u64,
    pub error: String,
}

/// Outcome of a batch of trials. Failures are kept, not dropped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub reports: Vec<TrialReport>,
    pub failures: Vec<TrialFailure>,
}

impl TrialBatch {
    fn push(&mut self, outcome: std::result::Result<TrialReport, TrialFailure>) {
        match outcome {
            Ok(r) => self.reports.push(r),
            Err(f) => self.failures.push(f),
        }
    }

    pub fn summary(&self) -> Option<Summary> {
        summarize(&self.reports).ok()
    }
}

/// Seed coordinate for a `(config, m)` cell. Benchmarks and grid searches
/// give trial `t` of the cell the child seed `(cell_seed, t, ..)`.
pub fn cell_seed(master: Seed, config: &GeneratorConfig, m: usize) -> Seed {
    master.child(&[label_hash(&config.to_string()), m as u64])
}

/// Generates, fits and scores one network.
pub(crate) fn run_one<T: Scalar>(
    train: &Dataset<T>,
    test: &Dataset<T>,
    config: &GeneratorConfig,
    m: usize,
    trial: usize,
    fold: Option<usize>,
    seed: Seed,
) -> std::result::Result<TrialReport, TrialFailure> {
    let start = Instant::now();
    let scored = (|| -> Result<(T, T)> {
        let params = config.generate(train, m, seed)?;
        let net = fit_output_weights(&params, train)?;
        let train_rmse = rmse(&predict(&net, train)?, train.targets())?;
        let test_rmse = rmse(&predict(&net, test)?, test.targets())?;
        Ok((train_rmse, test_rmse))
    })();
    match scored {
        Ok((tr, te)) => Ok(TrialReport {
            config: config.clone(),
            m,
            trial,
            fold,
            seed: seed.0,
            train_rmse: tr.to_f64_lossy(),
            test_rmse: te.to_f64_lossy(),
            wall_time_secs: start.elapsed().as_secs_f64(),
        }),
        Err(e) => Err(TrialFailure { config: config.clone(), m, trial, fold, seed: seed.0, error: e.to_string() }),
    }
}

/// Runs `num_trials` independent generate-fit-score rounds. Trial `t` uses
/// the child seed `(master_seed, t)`.
pub fn run_trials<T: Scalar>(
    train: &Dataset<T>,
    test: &Dataset<T>,
    config: &GeneratorConfig,
    m: usize,
    num_trials: usize,
    master_seed: Seed,
) -> Result<TrialBatch> {
    if num_trials == 0 {
        return Err(Error::argument("num_trials must be at least 1"));
    }
    config.validate()?;
    if train.dim() != test.dim() {
        return Err(Error::dimension(format!("train has {} inputs, test has {}", train.dim(), test.dim())));
    }
    let outcomes: Vec<_> = (0..num_trials)
        .into_par_iter()
        .map(|t| run_one(train, test, config, m, t, None, master_seed.child(&[t as u64])))
        .collect();
    let mut batch = TrialBatch::default();
    outcomes.into_iter().for_each(|o| batch.push(o));
    Ok(batch)
}
