//! Single-hidden-layer sigmoid network with least-squares output weights.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::datasets::{Dataset, InputScaling, NormalizationRecord};
use crate::numeric::solve_least_squares;
use crate::{Error, Result, Scalar, SCHEMA_VERSION};

/// Logistic function, evaluated without overflow for any finite `z`.
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Hidden layer: one weight row `a_i` and one bias `b_i` per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HiddenParamsRepr<T>", into = "HiddenParamsRepr<T>")]
#[serde(bound = "T: Scalar")]
pub struct HiddenParams<T> {
    weights: Vec<T>,
    biases: Vec<T>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct HiddenParamsRepr<T> {
    weights: Vec<Vec<T>>,
    biases: Vec<T>,
}

impl<T: Scalar> TryFrom<HiddenParamsRepr<T>> for HiddenParams<T> {
    type Error = Error;

    fn try_from(repr: HiddenParamsRepr<T>) -> Result<Self> {
        let dim = repr.weights.first().map_or(0, Vec::len);
        if repr.weights.iter().any(|w| w.len() != dim) {
            return Err(Error::dimension("weight rows have differing lengths"));
        }
        HiddenParams::new(repr.weights.concat(), dim, repr.biases)
    }
}

impl<T: Scalar> From<HiddenParams<T>> for HiddenParamsRepr<T> {
    fn from(p: HiddenParams<T>) -> Self {
        HiddenParamsRepr { weights: p.weights.chunks_exact(p.dim).map(<[T]>::to_vec).collect(), biases: p.biases }
    }
}

impl<T: Scalar> HiddenParams<T> {
    /// `weights` is row-major `m x dim`, one row per node.
    pub fn new(weights: Vec<T>, dim: usize, biases: Vec<T>) -> Result<Self> {
        if dim == 0 || biases.is_empty() {
            return Err(Error::argument("hidden layer needs n >= 1 and m >= 1"));
        }
        if weights.len() != dim * biases.len() {
            return Err(Error::dimension(format!(
                "{} weights for {} nodes of dimension {dim}",
                weights.len(),
                biases.len()
            )));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::argument("hidden parameters must be finite"));
        }
        Ok(HiddenParams { weights, biases, dim })
    }

    pub fn node_count(&self) -> usize {
        self.biases.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self, node: usize) -> &[T] {
        &self.weights[node * self.dim..(node + 1) * self.dim]
    }

    pub fn bias(&self, node: usize) -> T {
        self.biases[node]
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    /// Pre-activation `a_i . x + b_i`.
    pub fn activation(&self, node: usize, x: &[T]) -> T {
        self.weights(node).iter().zip(x).fold(self.biases[node], |acc, (&a, &xi)| acc + a * xi)
    }

    /// Sigmoid output of one node.
    pub fn output(&self, node: usize, x: &[T]) -> T {
        sigmoid(self.activation(node, x))
    }

    fn check_dim(&self, data: &Dataset<T>) -> Result<()> {
        if data.dim() != self.dim {
            return Err(Error::dimension(format!(
                "network expects {} inputs, data has {}",
                self.dim,
                data.dim()
            )));
        }
        Ok(())
    }
}

/// Hidden layer plus fitted output weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainedNetwork<T> {
    pub hidden: HiddenParams<T>,
    pub output_weights: Vec<T>,
}

impl<T: Scalar> TrainedNetwork<T> {
    pub fn new(hidden: HiddenParams<T>, output_weights: Vec<T>) -> Result<Self> {
        if output_weights.len() != hidden.node_count() {
            return Err(Error::dimension(format!(
                "{} output weights for {} hidden nodes",
                output_weights.len(),
                hidden.node_count()
            )));
        }
        if output_weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument("output weights must be finite"));
        }
        Ok(TrainedNetwork { hidden, output_weights })
    }
}

/// `N x m` matrix of hidden node outputs.
pub fn hidden_outputs<T: Scalar>(params: &HiddenParams<T>, data: &Dataset<T>) -> Result<Mat<T>> {
    params.check_dim(data)?;
    Ok(Mat::from_fn(data.len(), params.node_count(), |l, i| params.output(i, data.row(l))))
}

/// Solves `H beta = Y` in the minimum-norm least-squares sense.
pub fn fit_output_weights<T: Scalar>(params: &HiddenParams<T>, train: &Dataset<T>) -> Result<TrainedNetwork<T>> {
    let h = hidden_outputs(params, train)?;
    let beta = solve_least_squares(h.as_ref(), train.targets())?;
    TrainedNetwork::new(params.clone(), beta)
}

fn weighted_row_sums<T: Scalar>(h: &Mat<T>, beta: &[T]) -> Vec<T> {
    (0..h.nrows())
        .map(|l| beta.iter().enumerate().fold(T::zero(), |acc, (i, &b)| acc + b * h[(l, i)]))
        .collect()
}

pub fn predict<T: Scalar>(net: &TrainedNetwork<T>, data: &Dataset<T>) -> Result<Vec<T>> {
    let h = hidden_outputs(&net.hidden, data)?;
    Ok(weighted_row_sums(&h, &net.output_weights))
}

/// Per-node view of a network's output on some data.
#[derive(Debug, Clone)]
pub struct Decomposition<T> {
    /// `N x m` sigmoid outputs.
    pub raw: Mat<T>,
    /// `raw` with column `i` scaled by `beta_i`.
    pub weighted: Mat<T>,
    /// Network output; equal to [`predict`] bit for bit.
    pub fitted: Vec<T>,
}

pub fn decompose<T: Scalar>(net: &TrainedNetwork<T>, data: &Dataset<T>) -> Result<Decomposition<T>> {
    let raw = hidden_outputs(&net.hidden, data)?;
    let beta = &net.output_weights;
    let weighted = Mat::from_fn(raw.nrows(), raw.ncols(), |l, i| beta[i] * raw[(l, i)]);
    let fitted = weighted_row_sums(&raw, beta);
    Ok(Decomposition { raw, weighted, fitted })
}

/// JSON model file: network, scalings and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModelFile<T> {
    pub schema_version: String,
    pub n: usize,
    pub m: usize,
    pub network: TrainedNetwork<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_scaling: Option<InputScaling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
}

impl<T: Scalar> ModelFile<T> {
    pub fn new(network: TrainedNetwork<T>) -> Self {
        ModelFile {
            schema_version: SCHEMA_VERSION.to_string(),
            n: network.hidden.dim(),
            m: network.hidden.node_count(),
            network,
            normalization: None,
            input_scaling: None,
            generator: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.n != model.network.hidden.dim() || model.m != model.network.hidden.node_count() {
            return Err(Error::dimension("model header disagrees with its parameters"));
        }
        TrainedNetwork::new(model.network.hidden.clone(), model.network.output_weights.clone())?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rows: &[&[f64]], biases: &[f64]) -> HiddenParams<f64> {
        HiddenParams::new(rows.concat(), rows[0].len(), biases.to_vec()).unwrap()
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0_f64), 0.5);
        // 1 / (1 + 1/3) = 3/4
        assert!((sigmoid(3.0_f64.ln()) - 0.75).abs() < 1e-15);
        for z in [-30.0, -2.5, -1e-3, 0.7, 12.0] {
            assert!((sigmoid(z) + sigmoid(-z) - 1.0_f64).abs() < 1e-15);
        }
        assert_eq!(sigmoid(-1000.0_f64), 0.0);
        assert_eq!(sigmoid(1000.0_f64), 1.0);
        assert!(sigmoid(-800.0_f64).is_finite());
    }

    #[test]
    fn sigmoid_derivative_identity() {
        let h = 1e-5;
        let mut z = -10.0_f64;
        while z <= 10.0 {
            let fd = (sigmoid(z + h) - sigmoid(z - h)) / (2.0 * h);
            let s = sigmoid(z);
            assert!((fd - s * (1.0 - s)).abs() < 1e-6, "z = {z}");
            z += 0.05;
        }
    }

    #[test]
    fn hidden_output_examples() {
        let d = Dataset::new(vec![0.5, 0.1, 0.9], 1, vec![0.0; 3]).unwrap();
        let h = hidden_outputs(&params(&[&[0.0]], &[0.0]), &d).unwrap();
        assert!((0..3).all(|l| h[(l, 0)] == 0.5));
        let h = hidden_outputs(&params(&[&[4.0]], &[-2.0]), &d).unwrap();
        assert_eq!(h[(0, 0)], 0.5);
        let h = hidden_outputs(&params(&[&[3.0], &[-7.0]], &[1.0, 2.0]), &d).unwrap();
        assert!((0..3).all(|l| (0..2).all(|i| h[(l, i)] > 0.0 && h[(l, i)] < 1.0)));
        let wide = Dataset::new(vec![0.5, 0.5], 2, vec![0.0]).unwrap();
        assert!(matches!(hidden_outputs(&params(&[&[1.0]], &[0.0]), &wide), Err(Error::Dimension(_))));
    }

    #[test]
    fn constant_node_prediction() {
        let c = 0.37;
        let net = TrainedNetwork::new(params(&[&[0.0]], &[0.0]), vec![2.0 * c]).unwrap();
        let d = Dataset::new(vec![0.1, 0.5, 0.8], 1, vec![0.0; 3]).unwrap();
        assert!(predict(&net, &d).unwrap().iter().all(|&y| (y - c).abs() < 1e-15));
    }

    #[test]
    fn square_system_interpolates() {
        let d = Dataset::new(vec![0.0, 0.5, 1.0], 1, vec![0.2, 0.9, 0.4]).unwrap();
        let p = params(&[&[5.0], &[-3.0], &[9.0]], &[-1.0, 1.0, -6.0]);
        let net = fit_output_weights(&p, &d).unwrap();
        for (y, t) in predict(&net, &d).unwrap().iter().zip(d.targets()) {
            assert!((y - t).abs() < 1e-9);
        }
        let zero = fit_output_weights(&p, &d.with_targets(vec![0.0; 3]).unwrap()).unwrap();
        assert!(zero.output_weights.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn decomposition_matches_prediction() {
        let d = Dataset::new((0..20).map(|i| i as f64 / 19.0).collect(), 1, vec![0.0; 20]).unwrap();
        let net = TrainedNetwork::new(params(&[&[4.0], &[-8.0], &[1.5]], &[-2.0, 3.0, 0.1]), vec![1.3, 0.0, -0.4]).unwrap();
        let dec = decompose(&net, &d).unwrap();
        assert_eq!(dec.fitted, predict(&net, &d).unwrap());
        assert!((0..20).all(|l| dec.weighted[(l, 1)] == 0.0));
        for l in 0..20 {
            let s: f64 = (0..3).map(|i| dec.weighted[(l, i)]).sum();
            assert!((s - dec.fitted[l]).abs() < 1e-12);
        }
        let single = TrainedNetwork::new(params(&[&[2.0]], &[-1.0]), vec![0.8]).unwrap();
        let dec = decompose(&single, &d).unwrap();
        assert!((0..20).all(|l| dec.fitted[l] == 0.8 * dec.raw[(l, 0)]));
    }

    #[test]
    fn model_json_round_trip() {
        let net = TrainedNetwork::new(params(&[&[0.1, -2.0], &[1.0 / 3.0, 7.5]], &[0.25, -1e-17]), vec![std::f64::consts::PI, -0.0]).unwrap();
        let mut file = ModelFile::new(net);
        file.normalization = Some(NormalizationRecord { min: -0.8, max: 0.9 });
        let back = ModelFile::<f64>::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        let json = file.to_json().unwrap().replace("\"m\": 2", "\"m\": 3");
        assert!(ModelFile::<f64>::from_json(&json).is_err());
    }
}
