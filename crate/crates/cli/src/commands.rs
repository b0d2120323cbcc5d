use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use randfnn::datasets::{read_csv, write_csv, Dataset};
use randfnn::generators::GeneratorConfig;
use randfnn::harness::report::{to_json_document, write_benchmark_csv, write_cells_csv, write_failures_csv, write_trials_csv};
use randfnn::harness::{
    benchmark, cell_seed, grid_search_cv, node_sensitivity_sweep, noise_sensitivity_sweep, rmse, run_trials,
    BenchmarkEntry, TrialReport,
};
use randfnn::network::{decompose, fit_output_weights, predict, ModelFile};
use serde::Serialize;
use serde_json::{json, Value};

use crate::data;
use crate::settings::{argument, Settings};

/// Files written by one command, recorded in its manifest.
struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    fn new(settings: &Settings) -> Result<Self> {
        let dir = settings.out();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output { dir, written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    fn json<V: Serialize>(&mut self, name: &str, kind: &str, value: &V) -> Result<PathBuf> {
        let mut text = to_json_document(kind, value)?;
        text.push('\n');
        self.write(name, text)
    }

    fn csv(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> randfnn::Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write(name, buf)
    }

    /// `<command>-manifest.json`: effective configuration, data provenance
    /// and the list of files written. Contains nothing run-dependent, so
    /// reruns with the same flags reproduce it byte for byte.
    fn finish(mut self, command: &str, settings: &Settings, extra: Value) -> Result<()> {
        let manifest = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "effective_config": settings.effective(),
            "details": extra,
            "outputs": self.written,
        });
        self.json(&format!("{command}-manifest.json"), "manifest", &manifest)?;
        Ok(())
    }
}

fn print_json(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn hyperparameters(config: &GeneratorConfig) -> Value {
    Value::Object(config.hyperparameters().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

pub fn gen_data(settings: &Settings) -> Result<()> {
    let seed = settings.seed()?;
    if settings.data.is_some() {
        return Err(argument("gen-data builds synthetic data; --data is not accepted"));
    }
    let tf = settings.target_function()?.ok_or_else(|| argument("missing required --tf"))?;
    let (study, source) = data::synthetic(settings, tf, seed)?;
    let mut out = Output::new(settings)?;
    out.csv("train.csv", |b| write_csv(&study.train, b))?;
    out.csv("test.csv", |b| write_csv(&study.test, b))?;
    print_json(&json!({ "train_rows": study.train.len(), "test_rows": study.test.len(), "out": out.dir }))?;
    out.finish("gen-data", settings, json!({ "seed": seed.0, "source": source }))
}

#[derive(Serialize)]
struct TrainReport {
    config: GeneratorConfig,
    hyperparameters: Value,
    m: usize,
    seed: u64,
    train_rmse: f64,
    test_rmse: Option<f64>,
}

pub fn train(settings: &Settings) -> Result<()> {
    let master = settings.seed()?;
    let config = settings.generator()?;
    let m = settings.m()?;
    let loaded = data::load(settings, master)?;
    // same seed as trial 0 of this (config, m) cell in benchmark runs
    let seed = cell_seed(master, &config, m).child(&[0]);
    let params = config.generate(&loaded.train, m, seed)?;
    let net = fit_output_weights(&params, &loaded.train)?;
    let train_rmse = rmse(&predict(&net, &loaded.train)?, loaded.train.targets())?;
    let test_rmse = match &loaded.test {
        Some(test) => Some(rmse(&predict(&net, test)?, test.targets())?),
        None => None,
    };
    let report = TrainReport { hyperparameters: hyperparameters(&config), config: config.clone(), m, seed: seed.0, train_rmse, test_rmse };

    let mut model = ModelFile::new(net);
    model.normalization = loaded.normalization;
    model.input_scaling = loaded.input_scaling.clone();
    model.generator = Some(json!({ "config": config, "hyperparameters": report.hyperparameters, "seed": seed.0 }));

    let mut out = Output::new(settings)?;
    out.write("model.json", model.to_json()? + "\n")?;
    out.json("train-report.json", "train_report", &report)?;
    print_json(&serde_json::to_value(&report)?)?;
    out.finish("train", settings, json!({ "master_seed": master.0, "source": loaded.source }))
}

fn read_model(settings: &Settings) -> Result<(PathBuf, ModelFile<f64>)> {
    let path = settings.model.clone().ok_or_else(|| argument("missing required --model"))?;
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let model = ModelFile::from_json(&text).with_context(|| format!("loading model {}", path.display()))?;
    Ok((path, model))
}

/// Reads a CSV and maps it the way the model's training data was mapped.
fn dataset_for_model(path: &Path, settings: &Settings, model: &ModelFile<f64>) -> Result<Dataset<f64>> {
    let mut d: Dataset<f64> = read_csv(path)?.to_dataset(&settings.target_col()?)?;
    if d.dim() != model.n {
        return Err(randfnn::Error::Dimension(format!("model has {} inputs, {} has {}", model.n, path.display(), d.dim())).into());
    }
    if let Some(scaling) = &model.input_scaling {
        d = scaling.apply(&d);
    }
    if let Some(record) = &model.normalization {
        d = record.apply_to(&d);
    }
    Ok(d)
}

pub fn eval(settings: &Settings) -> Result<()> {
    let (model_path, model) = read_model(settings)?;
    let data_path = settings.data.clone().ok_or_else(|| argument("missing required --data"))?;
    let d = dataset_for_model(&data_path, settings, &model)?;
    let value = rmse(&predict(&model.network, &d)?, d.targets())?;
    let report = json!({ "model": model_path, "data": data_path, "rows": d.len(), "rmse": value });
    print_json(&report)?;
    let mut out = Output::new(settings)?;
    out.json("eval.json", "eval_report", &report)?;
    out.finish("eval", settings, Value::Null)
}

fn seq(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

pub const OIM_U_GRID: [f64; 18] =
    [0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 100.0, 200.0, 300.0, 400.0, 500.0];
pub const RSM_R_GRID: [f64; 8] = [0.0001, 0.001, 0.01, 0.015, 0.02, 0.3, 0.4, 0.5];
pub const RSM_S_GRID: [f64; 7] = [2.0, 4.0, 6.0, 8.0, 10.0, 20.0, 30.0];

/// Candidate generators for `method`, plus the candidates rejected by
/// validation with the reason.
fn config_grid(settings: &Settings) -> Result<(Vec<GeneratorConfig>, Vec<(String, String)>)> {
    let method = settings.method.as_deref().ok_or_else(|| argument("missing required --method"))?;
    let list = |v: &Option<Vec<f64>>, default: &[f64]| v.clone().unwrap_or_else(|| default.to_vec());
    let candidates: Vec<GeneratorConfig> = match method.to_ascii_lowercase().as_str() {
        "fim" => vec![GeneratorConfig::Fim],
        "oim" => list(&settings.u_grid, &OIM_U_GRID).into_iter().map(|u| GeneratorConfig::Oim { u }).collect(),
        "rsm" => {
            let s_grid = list(&settings.s_grid, &RSM_S_GRID);
            list(&settings.r_grid, &RSM_R_GRID)
                .into_iter()
                .flat_map(|r| s_grid.iter().map(move |&s| GeneratorConfig::Rsm { r, s }))
                .collect()
        }
        "rarsm" => {
            let highs = list(&settings.alpha_max_grid, &seq(5.0, 5.0, 18));
            list(&settings.alpha_min_grid, &seq(0.0, 5.0, 18))
                .into_iter()
                .flat_map(|lo| {
                    highs.iter().filter(move |&&hi| hi > lo).map(move |&hi| GeneratorConfig::Rarsm {
                        alpha_min_deg: lo,
                        alpha_max_deg: hi,
                    })
                })
                .collect()
        }
        "ddm" | "d-dm" => settings
            .k_prime_grid
            .clone()
            .unwrap_or_else(|| (1..=10).map(|i| 5 * i).collect())
            .into_iter()
            .map(|kp| GeneratorConfig::Ddm { k: kp.saturating_sub(1) })
            .collect(),
        other => return Err(argument(format!("unknown method '{other}'"))),
    };
    let mut valid = Vec::new();
    let mut skipped = Vec::new();
    for c in candidates {
        match c.validate() {
            Ok(()) => valid.push(c),
            Err(e) => skipped.push((c.to_string(), e.to_string())),
        }
    }
    if valid.is_empty() {
        return Err(argument(format!("no valid {method} configuration in the grid")));
    }
    Ok((valid, skipped))
}

pub fn grid_search(settings: &Settings) -> Result<()> {
    let master = settings.seed()?;
    let loaded = data::load(settings, master)?;
    let (configs, skipped) = config_grid(settings)?;
    let m_grid = settings.m_grid.clone().unwrap_or_else(|| (1..=20).map(|i| 50 * i).collect());
    let folds = settings.folds.unwrap_or(10);
    let trials = settings.trials(1);
    let outcome = grid_search_cv(&loaded.train, &configs, &m_grid, folds, trials, master)?;

    let test_check = match &loaded.test {
        Some(test) => {
            let seed = cell_seed(master, &outcome.best_config, outcome.best_m);
            let batch = run_trials(&loaded.train, test, &outcome.best_config, outcome.best_m, trials.max(1), seed)?;
            batch.summary().map(|s| json!({ "trials": s.count, "mean_test_rmse": s.mean, "std_test_rmse": s.std }))
        }
        None => None,
    };
    let best = json!({
        "method": outcome.best_config.method(),
        "config": outcome.best_config,
        "hyperparameters": hyperparameters(&outcome.best_config),
        "m": outcome.best_m,
        "cv_rmse": outcome.best_score,
        "folds": folds,
        "trials_per_cell": trials,
        "test": test_check,
        "skipped": skipped.iter().map(|(c, e)| json!({ "config": c, "reason": e })).collect::<Vec<_>>(),
        "excluded": outcome.excluded.iter().map(|(c, m)| json!({ "config": c.to_string(), "m": m })).collect::<Vec<_>>(),
    });

    let mut out = Output::new(settings)?;
    out.json("grid-best.json", "grid_search_best", &best)?;
    out.csv("grid-cells.csv", |b| write_cells_csv(b, &outcome.sweep))?;
    let reports: Vec<&TrialReport> = outcome.sweep.cells.iter().flat_map(|c| &c.batch.reports).collect();
    out.csv("grid-trials.csv", |b| write_trials_csv(b, reports))?;
    let failures: Vec<_> = outcome.sweep.cells.iter().flat_map(|c| &c.batch.failures).collect();
    if !failures.is_empty() {
        out.csv("grid-failures.csv", |b| write_failures_csv(b, failures))?;
    }
    print_json(&best)?;
    out.finish("grid-search", settings, json!({ "master_seed": master.0, "source": loaded.source }))
}

/// Tuned settings of each generator for the 2-D synthetic function.
pub fn default_entries() -> Vec<BenchmarkEntry> {
    vec![
        BenchmarkEntry::new(GeneratorConfig::Fim, 800),
        BenchmarkEntry::new(GeneratorConfig::Oim { u: 3.0 }, 1000),
        BenchmarkEntry::new(GeneratorConfig::Rsm { r: 0.4, s: 30.0 }, 450),
        BenchmarkEntry::new(GeneratorConfig::Rarsm { alpha_min_deg: 55.0, alpha_max_deg: 70.0 }, 350),
        BenchmarkEntry::new(GeneratorConfig::Ddm { k: 34 }, 300),
    ]
}

/// Parses `method=...,<hyperparameters>,m=<nodes>`.
pub fn parse_entry(text: &str) -> Result<BenchmarkEntry> {
    let mut m = None;
    let mut rest = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some((key, value)) if key.trim() == "m" => {
                m = Some(value.trim().parse::<usize>().map_err(|_| argument(format!("bad m in entry '{text}'")))?)
            }
            _ => rest.push(part),
        }
    }
    let m = m.ok_or_else(|| argument(format!("entry '{text}' needs m=<nodes>")))?;
    Ok(BenchmarkEntry::new(rest.join(",").parse()?, m))
}

pub fn benchmark_cmd(settings: &Settings) -> Result<()> {
    let master = settings.seed()?;
    let loaded = data::load(settings, master)?;
    let entries = match &settings.entries {
        Some(list) => list.iter().map(|e| parse_entry(e)).collect::<Result<Vec<_>>>()?,
        None => default_entries(),
    };
    let trials = settings.trials(10);
    let result = benchmark(&loaded.train, loaded.test()?, &entries, trials, master)?;

    let mut out = Output::new(settings)?;
    out.csv("benchmark.csv", |b| write_benchmark_csv(b, &result))?;
    out.json("benchmark.json", "benchmark", &result)?;
    out.csv("benchmark-trials.csv", |b| write_trials_csv(b, result.rows.iter().flat_map(|r| &r.batch.reports)))?;
    let failures: Vec<_> = result.rows.iter().flat_map(|r| &r.batch.failures).collect();
    if !failures.is_empty() {
        out.csv("benchmark-failures.csv", |b| write_failures_csv(b, failures))?;
    }
    let table: Vec<Value> = result
        .rows
        .iter()
        .map(|r| {
            json!({
                "method": r.entry.config.method(),
                "hyperparameters": hyperparameters(&r.entry.config),
                "m": r.entry.m,
                "mean_test_rmse": r.summary.map(|s| s.mean),
                "std_test_rmse": r.summary.map(|s| s.std),
                "error": r.error,
            })
        })
        .collect();
    print_json(&Value::Array(table))?;
    out.finish("benchmark", settings, json!({ "master_seed": master.0, "source": loaded.source }))
}

pub fn decompose_cmd(settings: &Settings) -> Result<()> {
    let (_, model) = read_model(settings)?;
    if model.n != 1 {
        return Err(argument(format!("decompose needs a single-input model, this one has n = {}", model.n)));
    }
    let points = settings.points.unwrap_or(1000);
    if points < 2 {
        return Err(argument("--points must be at least 2"));
    }
    // evenly spaced over the unit interval the network was trained on,
    // reported in the original units when the inputs were rescaled
    let unit: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let xs: Vec<f64> = match &model.input_scaling {
        Some(s) => unit.iter().map(|u| s.min[0] + u * (s.max[0] - s.min[0])).collect(),
        None => unit.clone(),
    };
    let grid = Dataset::new(unit, 1, vec![0.0; points])?;
    let parts = decompose(&model.network, &grid)?;
    let m = model.m;

    let mut w = csv_writer();
    let mut header = vec!["x".to_string(), "fitted".to_string()];
    header.extend((1..=m).map(|i| format!("h{i}")));
    header.extend((1..=m).map(|i| format!("beta_h{i}")));
    w.write_record(&header)?;
    for (l, x) in xs.iter().enumerate() {
        let mut row = vec![x.to_string(), parts.fitted[l].to_string()];
        row.extend((0..m).map(|i| parts.raw[(l, i)].to_string()));
        row.extend((0..m).map(|i| parts.weighted[(l, i)].to_string()));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut out = Output::new(settings)?;
    out.write("decompose.csv", bytes)?;
    print_json(&json!({ "rows": points, "nodes": m, "out": out.dir }))?;
    out.finish("decompose", settings, Value::Null)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

pub fn sweep(settings: &Settings) -> Result<()> {
    let master = settings.seed()?;
    let tf = settings.target_function()?.unwrap_or(randfnn::datasets::TargetFunction::Tf2);
    let setup = data::synthetic_setup(settings, tf)?;
    let c_grid = settings.c_grid.clone().unwrap_or_else(|| (0..=10).map(|i| i as f64 / 10.0).collect());
    let trials = settings.trials(10);
    let (result, axis) = match settings.vary.as_deref().unwrap_or("k-prime") {
        "k-prime" | "k_prime" => {
            let k_primes = settings.k_prime_grid.clone().unwrap_or_else(|| {
                [3, 5, 7].into_iter().chain((1..=10).map(|i| 10 * i)).collect()
            });
            let m = settings.m.unwrap_or(300);
            (noise_sensitivity_sweep::<f64>(&setup, &c_grid, &k_primes, m, trials, master)?, "k_prime")
        }
        "m" => {
            let m_grid = settings.m_grid.clone().unwrap_or_else(|| (1..=10).map(|i| 50 * i).collect());
            let k_prime = settings.k.map_or(20, |k| k + 1);
            (node_sensitivity_sweep::<f64>(&setup, &c_grid, &m_grid, k_prime, trials, master)?, "m")
        }
        other => return Err(argument(format!("--vary must be 'k-prime' or 'm', got '{other}'"))),
    };
    let best: Vec<Value> = result
        .argmin_by("c", axis)
        .into_iter()
        .map(|(c, v)| {
            let mut row = serde_json::Map::new();
            row.insert("c".into(), json!(c));
            row.insert(axis.into(), json!(v));
            Value::Object(row)
        })
        .collect();

    let mut out = Output::new(settings)?;
    out.csv("sweep-cells.csv", |b| write_cells_csv(b, &result))?;
    out.csv("sweep-trials.csv", |b| write_trials_csv(b, result.cells.iter().flat_map(|c| &c.batch.reports)))?;
    out.json("sweep.json", "sweep", &json!({ "axis": axis, "argmin": best, "sweep": result }))?;
    print_json(&json!({ "axis": axis, "argmin": best }))?;
    let source = json!({ "tf": tf.name(), "n_train": setup.n_train, "c_grid": c_grid, "trials": trials });
    out.finish("sweep", settings, json!({ "master_seed": master.0, "source": source }))
}
