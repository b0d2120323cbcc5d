use anyhow::{Context, Result};
use randfnn::datasets::{
    normalize_targets, read_csv, split_train_test, Dataset, InputScaling, NoiseSpec, NormalizationRecord, StudyData,
    TargetFunction, TestDesign,
};
use randfnn::harness::SyntheticSetup;
use randfnn::Seed;
use serde_json::{json, Value};

use crate::settings::{argument, Settings};

/// Child stream of the master seed used for data (never for trials).
const DATA_STREAM: u64 = 0xDA7A;
/// Share of a CSV kept for training when no test file is given.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.75;

pub struct Loaded {
    pub train: Dataset<f64>,
    pub test: Option<Dataset<f64>>,
    /// Set only when the CLI itself normalized CSV targets.
    pub normalization: Option<NormalizationRecord>,
    pub input_scaling: Option<InputScaling>,
    /// Provenance for manifests and model files.
    pub source: Value,
}

impl Loaded {
    pub fn test(&self) -> Result<&Dataset<f64>> {
        self.test.as_ref().ok_or_else(|| argument("this command needs a test set"))
    }
}

pub fn synthetic_setup(settings: &Settings, tf: TargetFunction) -> Result<SyntheticSetup> {
    let standard = SyntheticSetup::standard(tf);
    let test = match (settings.test_points, settings.grid) {
        (Some(n), _) => TestDesign::Random(n),
        (None, Some(p)) => TestDesign::Grid(p),
        (None, None) => standard.test,
    };
    Ok(SyntheticSetup {
        tf,
        n_train: settings.n_train.unwrap_or(standard.n_train),
        test,
        order: settings.noise_order(tf)?,
    })
}

pub fn synthetic(settings: &Settings, tf: TargetFunction, seed: Seed) -> Result<(StudyData<f64>, Value)> {
    let setup = synthetic_setup(settings, tf)?;
    let noise = settings.noise.unwrap_or(0.2);
    NoiseSpec::new(noise)?;
    let study = setup.study::<f64>(noise, seed.child(&[DATA_STREAM]))?;
    let source = json!({
        "tf": tf.name(),
        "n_train": setup.n_train,
        "noise": noise,
        "noise_order": match setup.order {
            randfnn::datasets::NoiseOrder::BeforeNormalization => "before",
            randfnn::datasets::NoiseOrder::AfterNormalization => "after",
        },
        "test": match setup.test {
            TestDesign::Random(n) => json!({ "random": n }),
            TestDesign::Grid(p) => json!({ "grid": p }),
        },
        "normalization": study.normalization,
    });
    Ok((study, source))
}

/// Training (and test) data from either `--tf` or `--data`.
pub fn load(settings: &Settings, seed: Seed) -> Result<Loaded> {
    match (settings.target_function()?, &settings.data) {
        (Some(_), Some(_)) => Err(argument("give either --tf or --data, not both")),
        (None, None) => Err(argument("missing data source: --tf or --data")),
        (Some(tf), None) => {
            let (study, source) = synthetic(settings, tf, seed)?;
            Ok(Loaded { train: study.train, test: Some(study.test), normalization: None, input_scaling: None, source })
        }
        (None, Some(path)) => {
            let target = settings.target_col()?;
            let raw = read_csv(path)?.to_dataset::<f64>(&target)?;
            let (raw_train, raw_test, split) = match &settings.test_data {
                Some(test_path) => {
                    let test = read_csv(test_path)?.to_dataset::<f64>(&target)?;
                    (raw, Some(test), None)
                }
                None => {
                    let fraction = settings.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION);
                    let (a, b) = split_train_test(&raw, fraction, seed.child(&[DATA_STREAM]))
                        .context("splitting the data file")?;
                    (a, Some(b), Some(fraction))
                }
            };
            if raw_test.as_ref().is_some_and(|t| t.dim() != raw_train.dim()) {
                return Err(argument("train and test files have different input counts"));
            }
            let scaling = InputScaling::fit(&raw_train);
            let mut train = scaling.apply(&raw_train);
            let mut test = raw_test.map(|t| scaling.apply(&t));
            let mut normalization = None;
            if settings.normalize_targets.unwrap_or(false) {
                let (normalized, record) = normalize_targets(&train)?;
                train = normalized;
                test = test.map(|t| record.apply_to(&t));
                normalization = Some(record);
            }
            let source = json!({
                "data": path,
                "test_data": settings.test_data,
                "train_fraction": split,
                "target_col": settings.target_col.as_deref().unwrap_or("last"),
                "rows": { "train": train.len(), "test": test.as_ref().map(Dataset::len) },
                "normalize_targets": normalization.is_some(),
            });
            Ok(Loaded { train, test, normalization, input_scaling: Some(scaling), source })
        }
    }
}
