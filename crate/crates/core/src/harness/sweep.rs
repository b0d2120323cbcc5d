use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trials, Summary, TrialBatch};
use crate::datasets::{synthetic_study, NoiseOrder, NoiseSpec, StudyData, TargetFunction, TestDesign};
use crate::generators::GeneratorConfig;
use crate::{Error, Result, Scalar, Seed};

const DATA_STREAM: u64 = 0xDA7A;

/// One named axis of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Trials of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    /// Named coordinates of the cell, e.g. `("c", 0.2), ("k_prime", 20)`.
    pub coordinates: Vec<(String, f64)>,
    pub config: GeneratorConfig,
    pub m: usize,
    /// Test-RMSE statistics over the successful trials.
    pub summary: Option<Summary>,
    pub batch: TrialBatch,
}

impl SweepCell {
    pub fn coordinate(&self, name: &str) -> Option<f64> {
        self.coordinates.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// Recomputes each cell's mean and std from its raw reports.
    pub fn check_consistency(&self, tol: f64) -> bool {
        self.cells.iter().all(|cell| match (&cell.summary, super::summarize(&cell.batch.reports)) {
            (Some(s), Ok(r)) => (s.mean - r.mean).abs() <= tol && (s.std - r.std).abs() <= tol && s.count == r.count,
            (None, Err(_)) => true,
            _ => false,
        })
    }

    /// For each value of `row_axis`, the `col_axis` value of the cell with
    /// the smallest mean test RMSE (ties to the smaller value).
    pub fn argmin_by(&self, row_axis: &str, col_axis: &str) -> Vec<(f64, f64)> {
        let Some(rows) = self.axes.iter().find(|a| a.name == row_axis) else { return vec![] };
        rows.values
            .iter()
            .filter_map(|&r| {
                self.cells
                    .iter()
                    .filter(|c| c.coordinate(row_axis) == Some(r))
                    .filter_map(|c| Some((c.summary?.mean, c.coordinate(col_axis)?)))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
                    .map(|(_, col)| (r, col))
            })
            .collect()
    }
}

/// Synthetic study layout shared by the sensitivity sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSetup {
    pub tf: TargetFunction,
    pub n_train: usize,
    pub test: TestDesign,
    pub order: NoiseOrder,
}

impl SyntheticSetup {
    /// 5000 noisy training points; a 100 x 100 test grid for `tf2`, 5000
    /// random test points for `tf1`; each function's standard noise order.
    pub fn standard(tf: TargetFunction) -> Self {
        let test = match tf {
            TargetFunction::Tf1 => TestDesign::Random(5000),
            TargetFunction::Tf2 => TestDesign::Grid(100),
        };
        SyntheticSetup { tf, n_train: 5000, test, order: NoiseOrder::standard_for(tf) }
    }

    /// Data for noise bound `c`. The inputs and unit noise draws are shared
    /// by every `c` under one master seed.
    pub fn study<T: Scalar>(&self, c: f64, master: Seed) -> Result<StudyData<T>> {
        synthetic_study(self.tf, self.n_train, NoiseSpec::new(c)?, self.order, self.test, master.child(&[DATA_STREAM]))
    }
}

fn d_dm_for(k_prime: usize, dim: usize) -> Result<GeneratorConfig> {
    if k_prime < dim + 1 {
        return Err(Error::argument(format!("k' = {k_prime} is below n + 1 = {}", dim + 1)));
    }
    Ok(GeneratorConfig::Ddm { k: k_prime - 1 })
}

fn sweep_over<T: Scalar>(
    setup: &SyntheticSetup,
    c_values: &[f64],
    second: (&str, &[usize]),
    cell: impl Fn(usize) -> Result<(GeneratorConfig, usize)> + Sync,
    trials: usize,
    master: Seed,
) -> Result<SweepResult> {
    if c_values.is_empty() || second.1.is_empty() {
        return Err(Error::argument("sweep grids must be non-empty"));
    }
    let studies: Vec<StudyData<T>> = c_values.iter().map(|&c| setup.study(c, master)).collect::<Result<_>>()?;
    let coords: Vec<(usize, usize)> =
        (0..c_values.len()).flat_map(|ci| (0..second.1.len()).map(move |j| (ci, j))).collect();
    let cells = coords
        .par_iter()
        .map(|&(ci, j)| {
            let c = c_values[ci];
            let v = second.1[j];
            let (config, m) = cell(v)?;
            let study = &studies[ci];
            let seed = master.child(&[c.to_bits(), v as u64]);
            let batch = run_trials(&study.train, &study.test, &config, m, trials, seed)?;
            Ok(SweepCell {
                coordinates: vec![("c".into(), c), (second.0.into(), v as f64)],
                config,
                m,
                summary: batch.summary(),
                batch,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axes: vec![
            Axis { name: "c".into(), values: c_values.to_vec() },
            Axis { name: second.0.into(), values: second.1.iter().map(|&v| v as f64).collect() },
        ],
        cells,
    })
}

/// D-DM test RMSE over noise bounds `c` and neighborhood sizes `k' = k + 1`
/// at a fixed node count.
pub fn noise_sensitivity_sweep<T: Scalar>(
    setup: &SyntheticSetup,
    c_values: &[f64],
    k_prime_values: &[usize],
    m_fixed: usize,
    trials: usize,
    master_seed: Seed,
) -> Result<SweepResult> {
    let dim = setup.tf.dim();
    sweep_over::<T>(setup, c_values, ("k_prime", k_prime_values), |kp| Ok((d_dm_for(kp, dim)?, m_fixed)), trials, master_seed)
}

/// D-DM test RMSE over noise bounds `c` and node counts `m` at a fixed
/// neighborhood size `k'`.
pub fn node_sensitivity_sweep<T: Scalar>(
    setup: &SyntheticSetup,
    c_values: &[f64],
    m_values: &[usize],
    k_prime_fixed: usize,
    trials: usize,
    master_seed: Seed,
) -> Result<SweepResult> {
    let config = d_dm_for(k_prime_fixed, setup.tf.dim())?;
    sweep_over::<T>(setup, c_values, ("m", m_values), |m| Ok((config.clone(), m)), trials, master_seed)
}
