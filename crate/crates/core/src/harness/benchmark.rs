use serde::{Deserialize, Serialize};

use super::{cell_seed, run_trials, Summary, TrialBatch};
use crate::datasets::Dataset;
use crate::generators::GeneratorConfig;
use crate::{Result, Scalar, Seed};

/// A method with its (pre-tuned) hyperparameters and node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub config: GeneratorConfig,
    pub m: usize,
}

impl BenchmarkEntry {
    pub fn new(config: GeneratorConfig, m: usize) -> Self {
        BenchmarkEntry { config, m }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub entry: BenchmarkEntry,
    /// `None` when every trial failed or the entry was rejected up front.
    pub summary: Option<Summary>,
    pub mean_train_rmse: Option<f64>,
    pub batch: TrialBatch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub master_seed: u64,
    pub trials: usize,
    pub rows: Vec<BenchmarkRow>,
}

/// Runs the trials of every entry on one train/test pair. An entry that
/// cannot run is reported in its row without stopping the others.
pub fn benchmark<T: Scalar>(
    train: &Dataset<T>,
    test: &Dataset<T>,
    entries: &[BenchmarkEntry],
    trials: usize,
    master_seed: Seed,
) -> Result<BenchmarkResult> {
    let rows = entries
        .iter()
        .map(|entry| match run_trials(train, test, &entry.config, entry.m, trials, cell_seed(master_seed, &entry.config, entry.m)) {
            Ok(batch) => {
                let mean_train = (!batch.reports.is_empty())
                    .then(|| batch.reports.iter().map(|r| r.train_rmse).sum::<f64>() / batch.reports.len() as f64);
                BenchmarkRow { entry: entry.clone(), summary: batch.summary(), mean_train_rmse: mean_train, batch, error: None }
            }
            Err(e) => BenchmarkRow {
                entry: entry.clone(),
                summary: None,
                mean_train_rmse: None,
                batch: TrialBatch::default(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(BenchmarkResult { master_seed: master_seed.0, trials, rows })
}
