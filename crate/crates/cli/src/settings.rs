//! Run configuration: flags, `RANDFNN_*` environment variables and an
//! optional TOML file, merged with precedence file < environment < flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use randfnn::datasets::{ColumnSelector, NoiseOrder, TargetFunction};
use randfnn::generators::GeneratorConfig;
use randfnn::Seed;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Every setting a command may read. Keys in the config file use the
/// field names below (`n_train`, `alpha_min`, `m_grid`, ...).
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Master seed; every random stream derives from it
    #[arg(long, env = "RANDFNN_SEED", help_heading = "Run")]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, env = "RANDFNN_OUT", help_heading = "Run")]
    pub out: Option<PathBuf>,
    #[arg(long, env = "RANDFNN_TRIALS", help_heading = "Run")]
    pub trials: Option<usize>,
    #[arg(long, env = "RANDFNN_FOLDS", help_heading = "Run")]
    pub folds: Option<usize>,

    /// Synthetic target function: tf1 (1-D) or tf2 (2-D)
    #[arg(long, env = "RANDFNN_TF", help_heading = "Data")]
    pub tf: Option<String>,
    /// Number of synthetic training points
    #[arg(long, env = "RANDFNN_N_TRAIN", help_heading = "Data")]
    pub n_train: Option<usize>,
    /// Bound c of the uniform target noise U(-c, c)
    #[arg(long, env = "RANDFNN_NOISE", help_heading = "Data")]
    pub noise: Option<f64>,
    /// before (noise on raw targets, then normalize) or after
    #[arg(long, env = "RANDFNN_NOISE_ORDER", help_heading = "Data")]
    pub noise_order: Option<String>,
    /// Size of a random synthetic test set
    #[arg(long, env = "RANDFNN_TEST_POINTS", help_heading = "Data", conflicts_with = "grid")]
    pub test_points: Option<usize>,
    /// Points per axis of a regular tf2 test grid
    #[arg(long, env = "RANDFNN_GRID", help_heading = "Data")]
    pub grid: Option<usize>,
    /// Training CSV (instead of a synthetic function)
    #[arg(long, env = "RANDFNN_DATA", help_heading = "Data", conflicts_with = "tf")]
    pub data: Option<PathBuf>,
    /// Test CSV; without it the training CSV is split at random
    #[arg(long, env = "RANDFNN_TEST_DATA", help_heading = "Data")]
    pub test_data: Option<PathBuf>,
    /// Target column: index, header name or "last"
    #[arg(long, env = "RANDFNN_TARGET_COL", help_heading = "Data")]
    pub target_col: Option<String>,
    /// Share of a CSV kept for training when no test CSV is given
    #[arg(long, env = "RANDFNN_TRAIN_FRACTION", help_heading = "Data")]
    pub train_fraction: Option<f64>,
    /// Min-max normalize CSV targets with the training range
    #[arg(long, env = "RANDFNN_NORMALIZE_TARGETS", help_heading = "Data", num_args = 0..=1, default_missing_value = "true")]
    pub normalize_targets: Option<bool>,

    /// fim, oim, rsm, rarsm or ddm
    #[arg(long, env = "RANDFNN_METHOD", help_heading = "Method")]
    pub method: Option<String>,
    /// Hidden nodes
    #[arg(long, env = "RANDFNN_M", help_heading = "Method")]
    pub m: Option<usize>,
    /// D-DM neighbors (neighborhood size k' = k + 1)
    #[arg(long, env = "RANDFNN_K", help_heading = "Method")]
    pub k: Option<usize>,
    /// OIM interval half-width
    #[arg(long, env = "RANDFNN_U", help_heading = "Method")]
    pub u: Option<f64>,
    /// rsM r, 0 < r < 0.5
    #[arg(long, env = "RANDFNN_R", help_heading = "Method")]
    pub r: Option<f64>,
    /// rsM s > 1
    #[arg(long, env = "RANDFNN_S", help_heading = "Method")]
    pub s: Option<f64>,
    /// RARSM lower slope angle in degrees
    #[arg(long, env = "RANDFNN_ALPHA_MIN", help_heading = "Method")]
    pub alpha_min: Option<f64>,
    /// RARSM upper slope angle in degrees
    #[arg(long, env = "RANDFNN_ALPHA_MAX", help_heading = "Method")]
    pub alpha_max: Option<f64>,

    #[arg(long, env = "RANDFNN_M_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    #[arg(long, env = "RANDFNN_U_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub u_grid: Option<Vec<f64>>,
    #[arg(long, env = "RANDFNN_R_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
    #[arg(long, env = "RANDFNN_S_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub s_grid: Option<Vec<f64>>,
    /// Angles combined pairwise with --alpha-max-grid (only min < max)
    #[arg(long, env = "RANDFNN_ALPHA_MIN_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub alpha_min_grid: Option<Vec<f64>>,
    #[arg(long, env = "RANDFNN_ALPHA_MAX_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub alpha_max_grid: Option<Vec<f64>>,
    /// D-DM neighborhood sizes k'
    #[arg(long, env = "RANDFNN_K_PRIME_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub k_prime_grid: Option<Vec<usize>>,
    /// Noise bounds for the sweep command
    #[arg(long, env = "RANDFNN_C_GRID", help_heading = "Grids", value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,

    /// Benchmark entry such as "method=ddm,k=34,m=300" (repeatable)
    #[arg(long = "entry", env = "RANDFNN_ENTRIES", help_heading = "Benchmark", value_delimiter = ';')]
    pub entries: Option<Vec<String>>,

    /// Model file written by `train`
    #[arg(long, env = "RANDFNN_MODEL", help_heading = "Model")]
    pub model: Option<PathBuf>,
    /// Evaluation grid size for `decompose`
    #[arg(long, env = "RANDFNN_POINTS", help_heading = "Model")]
    pub points: Option<usize>,

    /// Sweep axis: k-prime (noise sensitivity) or m (node sensitivity)
    #[arg(long, env = "RANDFNN_VARY", help_heading = "Sweep")]
    pub vary: Option<String>,
}

impl Settings {
    /// Fills every unset field from `file`. Values given by flag or
    /// environment are already in `self` and win.
    pub fn over(self, file: Settings) -> Result<Settings> {
        let mut merged = serde_json::to_value(&self)?;
        let base = serde_json::to_value(&file)?;
        if let (Value::Object(top), Value::Object(low)) = (&mut merged, base) {
            for (key, value) in low {
                if top.get(&key).is_none_or(Value::is_null) {
                    top.insert(key, value);
                }
            }
        }
        Ok(serde_json::from_value(merged)?)
    }

    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow!(randfnn::Error::Argument(format!("config {}: {e}", path.display()))))
    }

    /// The effective configuration with unset keys dropped.
    pub fn effective(&self) -> Value {
        match serde_json::to_value(self) {
            Ok(Value::Object(map)) => Value::Object(map.into_iter().filter(|(_, v)| !v.is_null()).collect()),
            _ => Value::Null,
        }
    }

    pub fn seed(&self) -> Result<Seed> {
        self.seed.map(Seed).ok_or_else(|| missing("seed"))
    }

    pub fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    pub fn m(&self) -> Result<usize> {
        self.m.ok_or_else(|| missing("m"))
    }

    pub fn target_function(&self) -> Result<Option<TargetFunction>> {
        self.tf.as_deref().map(|s| s.parse().map_err(anyhow::Error::from)).transpose()
    }

    pub fn noise_order(&self, tf: TargetFunction) -> Result<NoiseOrder> {
        match self.noise_order.as_deref() {
            None => Ok(NoiseOrder::standard_for(tf)),
            Some("before") => Ok(NoiseOrder::BeforeNormalization),
            Some("after") => Ok(NoiseOrder::AfterNormalization),
            Some(other) => Err(argument(format!("--noise-order must be 'before' or 'after', got '{other}'"))),
        }
    }

    pub fn target_col(&self) -> Result<ColumnSelector> {
        Ok(self.target_col.as_deref().unwrap_or("last").parse()?)
    }

    /// Generator built from `--method` and its hyperparameter flags.
    pub fn generator(&self) -> Result<GeneratorConfig> {
        let method = self.method.as_deref().ok_or_else(|| missing("method"))?;
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| argument(format!("method {method} needs --{flag}")));
        let config = match method.to_ascii_lowercase().as_str() {
            "fim" => GeneratorConfig::Fim,
            "oim" => GeneratorConfig::Oim { u: need(self.u, "u")? },
            "rsm" => GeneratorConfig::Rsm { r: need(self.r, "r")?, s: need(self.s, "s")? },
            "rarsm" => GeneratorConfig::Rarsm {
                alpha_min_deg: need(self.alpha_min, "alpha-min")?,
                alpha_max_deg: need(self.alpha_max, "alpha-max")?,
            },
            "ddm" | "d-dm" => GeneratorConfig::Ddm { k: self.k.ok_or_else(|| argument("method ddm needs --k"))? },
            other => bail!(randfnn::Error::Argument(format!("unknown method '{other}'"))),
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn argument(message: impl Into<String>) -> anyhow::Error {
    anyhow!(randfnn::Error::Argument(message.into()))
}

fn missing(flag: &str) -> anyhow::Error {
    argument(format!("missing required --{}", flag.replace('_', "-")))
}
