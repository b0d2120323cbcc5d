use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cell_seed, run_one, Axis, SweepCell, SweepResult, TrialBatch};
use crate::datasets::{k_fold_indices, Dataset};
use crate::generators::GeneratorConfig;
use crate::{Error, Result, Scalar, Seed};

const FOLD_STREAM: u64 = 0xF01D;

/// Best cell of a cross-validated grid search and the full grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchOutcome {
    pub best_config: GeneratorConfig,
    pub best_m: usize,
    /// Mean validation RMSE of the best cell.
    pub best_score: f64,
    pub sweep: SweepResult,
    /// Cells in which every fit failed.
    pub excluded: Vec<(GeneratorConfig, usize)>,
}

/// `folds`-fold cross-validation over the Cartesian product of `config_grid`
/// and `m_grid`.
///
/// Every cell sees the same fold split. Hidden nodes are regenerated for
/// every fold and trial. A cell's score is its mean validation RMSE over all
/// successful fits; ties go to the smaller `m`, then to the earlier config.
pub fn grid_search_cv<T: Scalar>(
    train: &Dataset<T>,
    config_grid: &[GeneratorConfig],
    m_grid: &[usize],
    folds: usize,
    trials_per_cell: usize,
    master_seed: Seed,
) -> Result<GridSearchOutcome> {
    if config_grid.is_empty() || m_grid.is_empty() {
        return Err(Error::argument("grid search needs non-empty config and node grids"));
    }
    if trials_per_cell == 0 {
        return Err(Error::argument("trials_per_cell must be at least 1"));
    }
    for c in config_grid {
        c.validate()?;
    }
    let fold_sets = k_fold_indices(train.len(), folds, master_seed.child(&[FOLD_STREAM]))?;
    let splits: Vec<(Dataset<T>, Dataset<T>)> = fold_sets
        .iter()
        .map(|held_out| {
            let mut mask = vec![true; train.len()];
            held_out.iter().for_each(|&i| mask[i] = false);
            let kept: Vec<usize> = (0..train.len()).filter(|&i| mask[i]).collect();
            Ok((train.select(&kept)?, train.select(held_out)?))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, &GeneratorConfig, usize)> = config_grid
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| m_grid.iter().map(move |&m| (ci, c, m)))
        .collect();
    let units: Vec<(usize, usize, usize)> = (0..cells.len())
        .flat_map(|cell| (0..folds).flat_map(move |f| (0..trials_per_cell).map(move |t| (cell, f, t))))
        .collect();
    let outcomes: Vec<_> = units
        .par_iter()
        .map(|&(cell, f, t)| {
            let (_, config, m) = cells[cell];
            let seed = cell_seed(master_seed, config, m).child(&[t as u64, f as u64]);
            let (fit_set, held_out) = &splits[f];
            run_one(fit_set, held_out, config, m, t, Some(f), seed)
        })
        .collect();

    let mut batches = vec![TrialBatch::default(); cells.len()];
    for (&(cell, _, _), outcome) in units.iter().zip(outcomes) {
        batches[cell].push(outcome);
    }
    let mut sweep_cells = Vec::with_capacity(cells.len());
    let mut excluded = Vec::new();
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for (cell, batch) in batches.into_iter().enumerate() {
        let (ci, config, m) = cells[cell];
        let summary = batch.summary();
        match summary {
            Some(s) => {
                let key = (s.mean, m, ci, cell);
                let better = best.is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2));
                if better {
                    best = Some(key);
                }
            }
            None => excluded.push((config.clone(), m)),
        }
        let mut coordinates: Vec<(String, f64)> =
            config.hyperparameters().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        coordinates.push(("m".into(), m as f64));
        sweep_cells.push(SweepCell { coordinates, config: config.clone(), m, summary, batch });
    }
    let (best_score, best_m, best_ci, _) =
        best.ok_or_else(|| Error::Solver("every grid cell failed".into()))?;
    let axes = vec![
        Axis { name: "config".into(), values: (0..config_grid.len()).map(|i| i as f64).collect() },
        Axis { name: "m".into(), values: m_grid.iter().map(|&m| m as f64).collect() },
    ];
    Ok(GridSearchOutcome {
        best_config: config_grid[best_ci].clone(),
        best_m,
        best_score,
        sweep: SweepResult { axes, cells: sweep_cells },
        excluded,
    })
}
