//! CSV and JSON emission of harness results.
//!
//! CSV files hold only deterministic columns (no wall-clock timings), so two
//! runs with the same seed produce byte-identical files. Timings go to JSON.

use std::io::Write;

use serde::Serialize;

use super::{BenchmarkResult, SweepResult, TrialFailure, TrialReport};
use crate::{Result, SCHEMA_VERSION};

fn params_label(config: &crate::generators::GeneratorConfig) -> String {
    config.hyperparameters().iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per trial.
pub fn write_trials_csv<'a, W: Write>(out: W, reports: impl IntoIterator<Item = &'a TrialReport>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "params", "m", "trial", "fold", "seed", "train_rmse", "test_rmse"])?;
    for r in reports {
        w.write_record([
            r.method().to_string(),
            params_label(&r.config),
            r.m.to_string(),
            r.trial.to_string(),
            r.fold.map(|f| f.to_string()).unwrap_or_default(),
            r.seed.to_string(),
            r.train_rmse.to_string(),
            r.test_rmse.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per failed trial.
pub fn write_failures_csv<'a, W: Write>(out: W, failures: impl IntoIterator<Item = &'a TrialFailure>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "params", "m", "trial", "fold", "seed", "error"])?;
    for f in failures {
        w.write_record([
            f.config.method().to_string(),
            params_label(&f.config),
            f.m.to_string(),
            f.trial.to_string(),
            f.fold.map(|x| x.to_string()).unwrap_or_default(),
            f.seed.to_string(),
            f.error.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per sweep cell: coordinates, then aggregate test RMSE.
pub fn write_cells_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let coord_names: Vec<String> = sweep.cells.first().map_or_else(Vec::new, |c| c.coordinates.iter().map(|(n, _)| n.clone()).collect());
    let uniform = sweep.cells.iter().all(|c| c.coordinates.iter().map(|(n, _)| n).eq(coord_names.iter()));
    let mut header = vec!["method".to_string(), "params".into()];
    if uniform {
        header.extend(coord_names.iter().cloned());
    }
    header.extend(["m", "trials", "failures", "mean_test_rmse", "std_test_rmse", "min", "q1", "median", "q3", "max"].map(String::from));
    w.write_record(&header)?;
    for c in &sweep.cells {
        let mut row = vec![c.config.method().to_string(), params_label(&c.config)];
        if uniform {
            row.extend(c.coordinates.iter().map(|(_, v)| v.to_string()));
        }
        let s = c.summary;
        row.extend([
            c.m.to_string(),
            c.batch.reports.len().to_string(),
            c.batch.failures.len().to_string(),
            opt(s.map(|s| s.mean)),
            opt(s.map(|s| s.std)),
            opt(s.map(|s| s.min)),
            opt(s.map(|s| s.q1)),
            opt(s.map(|s| s.median)),
            opt(s.map(|s| s.q3)),
            opt(s.map(|s| s.max)),
        ]);
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per benchmarked method: mean and std of test RMSE, node count,
/// hyperparameters.
pub fn write_benchmark_csv<W: Write>(out: W, result: &BenchmarkResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "params", "m", "trials", "failures", "mean_test_rmse", "std_test_rmse", "median_test_rmse", "mean_train_rmse", "error"])?;
    for row in &result.rows {
        let s = row.summary;
        w.write_record([
            row.entry.config.method().to_string(),
            params_label(&row.entry.config),
            row.entry.m.to_string(),
            row.batch.reports.len().to_string(),
            row.batch.failures.len().to_string(),
            opt(s.map(|s| s.mean)),
            opt(s.map(|s| s.std)),
            opt(s.map(|s| s.median)),
            opt(row.mean_train_rmse),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, V: Serialize> {
    schema_version: &'static str,
    kind: &'a str,
    data: &'a V,
}

/// Pretty JSON document `{schema_version, kind, data}`.
pub fn to_json_document<V: Serialize>(kind: &str, value: &V) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Envelope { schema_version: SCHEMA_VERSION, kind, data: value })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::GeneratorConfig;
    use crate::harness::{TrialBatch, TrialReport};

    fn report(t: usize, rmse: f64) -> TrialReport {
        TrialReport { config: GeneratorConfig::Ddm { k: 34 }, m: 300, trial: t, fold: None, seed: 7, train_rmse: 0.1, test_rmse: rmse, wall_time_secs: 1.5 }
    }

    #[test]
    fn trial_csv_omits_timing() {
        let mut buf = Vec::new();
        write_trials_csv(&mut buf, &[report(0, 0.037)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "method,params,m,trial,fold,seed,train_rmse,test_rmse\nddm,k=34;k_prime=35,300,0,,7,0.1,0.037\n");
    }

    #[test]
    fn benchmark_csv_has_one_row_per_method() {
        let batch = TrialBatch { reports: vec![report(0, 0.03), report(1, 0.05)], failures: vec![] };
        let result = BenchmarkResult {
            master_seed: 1,
            trials: 2,
            rows: vec![crate::harness::BenchmarkRow {
                entry: crate::harness::BenchmarkEntry::new(GeneratorConfig::Ddm { k: 34 }, 300),
                summary: batch.summary(),
                mean_train_rmse: Some(0.1),
                batch,
                error: None,
            }],
        };
        let mut buf = Vec::new();
        write_benchmark_csv(&mut buf, &result).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("ddm,k=34;k_prime=35,300,2,0,0.04,"));
    }

    #[test]
    fn json_documents_carry_schema_version() {
        let doc = to_json_document("trial", &report(0, 0.5)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["data"]["config"]["method"], "ddm");
    }
}
