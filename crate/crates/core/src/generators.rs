//! Hidden-node parameter generation schemes.
//!
//! | scheme | weights | biases |
//! |--------|---------|--------|
//! | FIM    | `U(-1, 1)` | `U(-1, 1)` |
//! | OIM    | `U(-u, u)` | `U(-u, u)` |
//! | rsM    | random split of a weight sum drawn from an `(r, s)` interval | inflection on a training point |
//! | RARSM  | random slope angle and rotation | inflection on a training point |
//! | D-DM   | 4 x slopes of a hyperplane fitted around a training point | inflection on that point |

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datasets::{k_nearest_neighbors, Dataset};
use crate::network::HiddenParams;
use crate::numeric::{fit_hyperplane, HyperplaneFit};
use crate::rng::uniform;
use crate::{Error, Result, Scalar, Seed};

/// rsM resamples its proportions while `|sum(zeta)|` is below this.
pub const RSM_MIN_PROPORTION_SUM: f64 = 1e-3;
/// RARSM rejects slope angles this close (degrees) to 90.
pub const RARSM_RIGHT_ANGLE_MARGIN_DEG: f64 = 1e-6;
/// RARSM resamples the normal vector when every component is below this.
pub const RARSM_MIN_NORMAL_COMPONENT: f64 = 1e-12;

/// A generation scheme with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum GeneratorConfig {
    Fim,
    Oim { u: f64 },
    Rsm { r: f64, s: f64 },
    Rarsm { alpha_min_deg: f64, alpha_max_deg: f64 },
    /// `k` nearest neighbors; the neighborhood holds `k' = k + 1` points.
    Ddm { k: usize },
}

impl GeneratorConfig {
    pub fn method(&self) -> &'static str {
        match self {
            GeneratorConfig::Fim => "fim",
            GeneratorConfig::Oim { .. } => "oim",
            GeneratorConfig::Rsm { .. } => "rsm",
            GeneratorConfig::Rarsm { .. } => "rarsm",
            GeneratorConfig::Ddm { .. } => "ddm",
        }
    }

    /// Checks the data-independent hyperparameter constraints.
    pub fn validate(&self) -> Result<()> {
        match *self {
            GeneratorConfig::Fim => Ok(()),
            GeneratorConfig::Oim { u } if u > 0.0 && u.is_finite() => Ok(()),
            GeneratorConfig::Oim { u } => Err(Error::argument(format!("OIM needs u > 0, got {u}"))),
            GeneratorConfig::Rsm { r, s } => {
                if !(r > 0.0 && r < 0.5) {
                    return Err(Error::argument(format!("rsM needs 0 < r < 0.5, got {r}")));
                }
                if !(s > 1.0 && s.is_finite()) {
                    return Err(Error::argument(format!("rsM needs s > 1, got {s}")));
                }
                Ok(())
            }
            GeneratorConfig::Rarsm { alpha_min_deg: lo, alpha_max_deg: hi } => {
                if !(0.0 <= lo && lo < hi && hi <= 90.0) {
                    return Err(Error::argument(format!(
                        "RARSM needs 0 <= alpha_min < alpha_max <= 90 degrees, got ({lo}, {hi})"
                    )));
                }
                if lo >= 90.0 - RARSM_RIGHT_ANGLE_MARGIN_DEG {
                    return Err(Error::argument("RARSM angle interval lies entirely at 90 degrees"));
                }
                Ok(())
            }
            GeneratorConfig::Ddm { k } if k >= 1 => Ok(()),
            GeneratorConfig::Ddm { .. } => Err(Error::argument("D-DM needs k >= 1")),
        }
    }

    /// Draws `m` hidden nodes for `train`.
    pub fn generate<T: Scalar>(&self, train: &Dataset<T>, m: usize, seed: Seed) -> Result<HiddenParams<T>> {
        self.validate()?;
        match *self {
            GeneratorConfig::Fim => generate_fim(train.dim(), m, seed),
            GeneratorConfig::Oim { u } => generate_oim(train.dim(), m, u, seed),
            GeneratorConfig::Rsm { r, s } => generate_rsm(train, m, r, s, seed),
            GeneratorConfig::Rarsm { alpha_min_deg, alpha_max_deg } => {
                generate_rarsm(train, m, alpha_min_deg, alpha_max_deg, seed)
            }
            GeneratorConfig::Ddm { k } => generate_ddm(train, m, k, seed),
        }
    }

    /// Hyperparameters as flat `(name, value)` pairs, excluding the method.
    pub fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            GeneratorConfig::Fim => vec![],
            GeneratorConfig::Oim { u } => vec![("u", u)],
            GeneratorConfig::Rsm { r, s } => vec![("r", r), ("s", s)],
            GeneratorConfig::Rarsm { alpha_min_deg, alpha_max_deg } => {
                vec![("alpha_min", alpha_min_deg), ("alpha_max", alpha_max_deg)]
            }
            GeneratorConfig::Ddm { k } => vec![("k", k as f64), ("k_prime", (k + 1) as f64)],
        }
    }
}

/// `method=ddm,k=34` style rendering; round-trips through [`FromStr`].
impl fmt::Display for GeneratorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "method={}", self.method())?;
        match *self {
            GeneratorConfig::Fim => Ok(()),
            GeneratorConfig::Oim { u } => write!(f, ",u={u}"),
            GeneratorConfig::Rsm { r, s } => write!(f, ",r={r},s={s}"),
            GeneratorConfig::Rarsm { alpha_min_deg, alpha_max_deg } => {
                write!(f, ",alpha_min={alpha_min_deg},alpha_max={alpha_max_deg}")
            }
            GeneratorConfig::Ddm { k } => write!(f, ",k={k}"),
        }
    }
}

/// Parses flat `key=value` pairs separated by commas. `k_prime` is accepted
/// for D-DM in place of `k`.
impl FromStr for GeneratorConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut method = None;
        let mut values = std::collections::BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::argument(format!("expected key=value, got '{part}'")))?;
            let key = key.trim().replace('-', "_");
            if key == "method" {
                method = Some(value.trim().to_ascii_lowercase());
            } else {
                let v: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::argument(format!("'{key}' needs a number, got '{value}'")))?;
                values.insert(key, v);
            }
        }
        let method = method.ok_or_else(|| Error::argument("missing method=..."))?;
        let mut take = |key: &str| {
            values.remove(key).ok_or_else(|| Error::argument(format!("method {method} needs '{key}'")))
        };
        let config = match method.as_str() {
            "fim" => GeneratorConfig::Fim,
            "oim" => GeneratorConfig::Oim { u: take("u")? },
            "rsm" => GeneratorConfig::Rsm { r: take("r")?, s: take("s")? },
            "rarsm" => GeneratorConfig::Rarsm { alpha_min_deg: take("alpha_min")?, alpha_max_deg: take("alpha_max")? },
            "ddm" | "d-dm" => {
                let k = match (values.remove("k"), values.remove("k_prime")) {
                    (Some(k), None) => k,
                    (None, Some(kp)) => kp - 1.0,
                    (Some(_), Some(_)) => return Err(Error::argument("give either k or k_prime, not both")),
                    (None, None) => return Err(Error::argument("method ddm needs 'k' or 'k_prime'")),
                };
                if k < 0.0 || k.fract() != 0.0 {
                    return Err(Error::argument(format!("k must be a non-negative integer, got {k}")));
                }
                GeneratorConfig::Ddm { k: k as usize }
            }
            other => return Err(Error::argument(format!("unknown method '{other}'"))),
        };
        if let Some(extra) = values.keys().next() {
            return Err(Error::argument(format!("unexpected key '{extra}' for {}", config.method())));
        }
        config.validate()?;
        Ok(config)
    }
}

fn check_nodes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::argument("need n >= 1 inputs and m >= 1 nodes"));
    }
    Ok(())
}

/// Every weight and bias i.i.d. `U(-1, 1)`.
pub fn generate_fim<T: Scalar>(n: usize, m: usize, seed: Seed) -> Result<HiddenParams<T>> {
    generate_interval(n, m, 1.0, seed)
}

/// Every weight and bias i.i.d. `U(-u, u)`.
pub fn generate_oim<T: Scalar>(n: usize, m: usize, u: f64, seed: Seed) -> Result<HiddenParams<T>> {
    GeneratorConfig::Oim { u }.validate()?;
    generate_interval(n, m, u, seed)
}

fn generate_interval<T: Scalar>(n: usize, m: usize, u: f64, seed: Seed) -> Result<HiddenParams<T>> {
    check_nodes(n, m)?;
    let mut rng = seed.rng();
    let mut weights = Vec::with_capacity(n * m);
    let mut biases = Vec::with_capacity(m);
    for _ in 0..m {
        weights.extend((0..n).map(|_| T::of(uniform(&mut rng, -u, u))));
        biases.push(T::of(uniform(&mut rng, -u, u)));
    }
    HiddenParams::new(weights, n, biases)
}

/// Bias placing the node's inflection point on `anchor`.
fn inflection_bias<T: Scalar>(weights: &[T], anchor: &[T]) -> T {
    -weights.iter().zip(anchor).fold(T::zero(), |acc, (&a, &x)| acc + a * x)
}

fn draw_anchor<T: Scalar, R: Rng>(train: &Dataset<T>, rng: &mut R) -> usize {
    rng.random_range(0..train.len())
}

/// Per-node record of an rsM draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RsmNode {
    /// Signed weight sum of the node.
    pub weight_sum: f64,
    pub anchor_index: usize,
}

/// Bounds of `|weight sum|` for rsM: `[ln((1-r)/r), s ln((1-r)/r)]`.
pub fn rsm_interval(r: f64, s: f64) -> (f64, f64) {
    let lo = ((1.0 - r) / r).ln();
    (lo, s * lo)
}

pub fn generate_rsm<T: Scalar>(train: &Dataset<T>, m: usize, r: f64, s: f64, seed: Seed) -> Result<HiddenParams<T>> {
    generate_rsm_traced(train, m, r, s, seed).map(|(p, _)| p)
}

/// rsM with the per-node weight sums and anchors.
pub fn generate_rsm_traced<T: Scalar>(
    train: &Dataset<T>,
    m: usize,
    r: f64,
    s: f64,
    seed: Seed,
) -> Result<(HiddenParams<T>, Vec<RsmNode>)> {
    GeneratorConfig::Rsm { r, s }.validate()?;
    let n = train.dim();
    check_nodes(n, m)?;
    let (lo, hi) = rsm_interval(r, s);
    let mut rng = seed.rng();
    let mut weights = Vec::with_capacity(n * m);
    let mut biases = Vec::with_capacity(m);
    let mut trace = Vec::with_capacity(m);
    let mut zeta = vec![0.0; n];
    for _ in 0..m {
        let total = loop {
            zeta.iter_mut().for_each(|z| *z = uniform(&mut rng, -1.0, 1.0));
            let total: f64 = zeta.iter().sum();
            if total.abs() >= RSM_MIN_PROPORTION_SUM {
                break total;
            }
        };
        let magnitude = uniform(&mut rng, lo, hi);
        let weight_sum = if rng.random::<bool>() { magnitude } else { -magnitude };
        let node: Vec<T> = zeta.iter().map(|&z| T::of((z / total) * weight_sum)).collect();
        let anchor_index = draw_anchor(train, &mut rng);
        biases.push(inflection_bias(&node, train.row(anchor_index)));
        weights.extend(node);
        trace.push(RsmNode { weight_sum, anchor_index });
    }
    Ok((HiddenParams::new(weights, n, biases)?, trace))
}

/// Per-node record of a RARSM draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RarsmNode {
    pub alpha_deg: f64,
    /// Components `a'_1..a'_n` of the tangent hyperplane normal.
    pub normal: Vec<f64>,
    /// The `y` component `a'_0` of the normal.
    pub normal_y: f64,
    pub anchor_index: usize,
}

impl RarsmNode {
    /// Angle between the normal and the `y` axis, recomputed from the
    /// normal vector.
    pub fn reconstructed_alpha_deg(&self) -> f64 {
        let norm = self.normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        (norm / self.normal_y.abs()).atan().to_degrees()
    }
}

pub fn generate_rarsm<T: Scalar>(
    train: &Dataset<T>,
    m: usize,
    alpha_min_deg: f64,
    alpha_max_deg: f64,
    seed: Seed,
) -> Result<HiddenParams<T>> {
    generate_rarsm_traced(train, m, alpha_min_deg, alpha_max_deg, seed).map(|(p, _)| p)
}

/// RARSM with the per-node angles, normals and anchors.
pub fn generate_rarsm_traced<T: Scalar>(
    train: &Dataset<T>,
    m: usize,
    alpha_min_deg: f64,
    alpha_max_deg: f64,
    seed: Seed,
) -> Result<(HiddenParams<T>, Vec<RarsmNode>)> {
    GeneratorConfig::Rarsm { alpha_min_deg, alpha_max_deg }.validate()?;
    let n = train.dim();
    check_nodes(n, m)?;
    let mut rng = seed.rng();
    let mut weights = Vec::with_capacity(n * m);
    let mut biases = Vec::with_capacity(m);
    let mut trace = Vec::with_capacity(m);
    for _ in 0..m {
        let alpha_deg = loop {
            let a = uniform(&mut rng, alpha_min_deg, alpha_max_deg);
            if a > alpha_min_deg && a < alpha_max_deg && a < 90.0 - RARSM_RIGHT_ANGLE_MARGIN_DEG {
                break a;
            }
        };
        let normal: Vec<f64> = loop {
            let v: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
            if v.iter().any(|a| a.abs() >= RARSM_MIN_NORMAL_COMPONENT) {
                break v;
            }
        };
        let sign = if rng.random::<bool>() { -1.0 } else { 1.0 };
        let norm = normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        let normal_y = sign * norm / alpha_deg.to_radians().tan();
        let node: Vec<T> = normal.iter().map(|&a| T::of(-4.0 * a / normal_y)).collect();
        let anchor_index = draw_anchor(train, &mut rng);
        biases.push(inflection_bias(&node, train.row(anchor_index)));
        weights.extend(node);
        trace.push(RarsmNode { alpha_deg, normal, normal_y, anchor_index });
    }
    Ok((HiddenParams::new(weights, n, biases)?, trace))
}

/// Per-node record of a D-DM draw.
#[derive(Debug, Clone, PartialEq)]
pub struct DdmNode<T> {
    pub anchor_index: usize,
    pub fit: HyperplaneFit<T>,
}

pub fn generate_ddm<T: Scalar>(train: &Dataset<T>, m: usize, k: usize, seed: Seed) -> Result<HiddenParams<T>> {
    generate_ddm_traced(train, m, k, seed).map(|(p, _)| p)
}

/// Data-driven nodes: for each node pick a training point at random (with
/// replacement across nodes), fit a hyperplane to it and its `k` nearest
/// neighbors, and set weights `4 a'` with the inflection point on the anchor.
/// A sigmoid with this inflection point has slope `a'_j` along `x_j` there.
pub fn generate_ddm_traced<T: Scalar>(
    train: &Dataset<T>,
    m: usize,
    k: usize,
    seed: Seed,
) -> Result<(HiddenParams<T>, Vec<DdmNode<T>>)> {
    let n = train.dim();
    check_nodes(n, m)?;
    if k < n {
        return Err(Error::argument(format!("D-DM needs k >= n = {n} neighbors, got {k}")));
    }
    if k >= train.len() {
        return Err(Error::argument(format!("D-DM needs k < N = {}, got {k}", train.len())));
    }
    let four = T::of(4.0);
    let mut rng = seed.rng();
    let mut weights = Vec::with_capacity(n * m);
    let mut biases = Vec::with_capacity(m);
    let mut trace = Vec::with_capacity(m);
    for _ in 0..m {
        let anchor_index = draw_anchor(train, &mut rng);
        let neighborhood = k_nearest_neighbors(train, anchor_index, k)?;
        let fit = fit_hyperplane(&neighborhood)?;
        let node: Vec<T> = fit.slopes.iter().map(|&a| four * a).collect();
        biases.push(inflection_bias(&node, train.row(anchor_index)));
        weights.extend(node);
        trace.push(DdmNode { anchor_index, fit });
    }
    Ok((HiddenParams::new(weights, n, biases)?, trace))
}
