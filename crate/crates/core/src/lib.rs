//! Randomized learning of single-hidden-layer feedforward networks.
//!
//! Hidden-node weights and biases are produced by one of five generation
//! schemes and only the output weights are fitted, by a single
//! minimum-norm least-squares solve. The schemes range from the classic
//! fixed interval draw to a data-driven scheme that fits a local hyperplane
//! around a randomly chosen training point and turns its slopes into the
//! weights of a sigmoid whose inflection point sits on that point.
//!
//! All numerical code is generic over [`Scalar`] (implemented for `f32` and
//! `f64`). The `*F64` / `*F32` aliases below name the concrete types most
//! callers want.
//!
//! ```
//! use randfnn::{datasets, generators::GeneratorConfig, network, Seed};
//!
//! # fn main() -> randfnn::Result<()> {
//! let clean = datasets::generate_tf1::<f64>(500, Seed(7))?;
//! let (train, _record) = datasets::normalize_targets(&clean)?;
//! let params = GeneratorConfig::Ddm { k: 20 }.generate(&train, 25, Seed(1))?;
//! let net = network::fit_output_weights(&params, &train)?;
//! let fitted = network::predict(&net, &train)?;
//! assert_eq!(fitted.len(), train.len());
//! # Ok(())
//! # }
//! ```

pub mod datasets;
mod error;
pub mod generators;
pub mod harness;
pub mod network;
pub mod numeric;
mod rng;
mod scalar;

pub use error::{Error, Result};
pub use rng::{derive_seed, label_hash, Seed};
pub use scalar::Scalar;

/// Version tag written into every JSON artifact.
pub const SCHEMA_VERSION: &str = "randfnn/1";

pub type DatasetF64 = datasets::Dataset<f64>;
pub type DatasetF32 = datasets::Dataset<f32>;
pub type HiddenParamsF64 = network::HiddenParams<f64>;
pub type HiddenParamsF32 = network::HiddenParams<f32>;
pub type TrainedNetworkF64 = network::TrainedNetwork<f64>;
pub type TrainedNetworkF32 = network::TrainedNetwork<f32>;
pub type NeighborhoodF64 = datasets::Neighborhood<f64>;
pub type HyperplaneFitF64 = numeric::HyperplaneFit<f64>;
