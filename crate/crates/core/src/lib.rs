//! Neurochaos learning for cause-effect classification of coupled time series.
//!
//! - [`dynamics`]: chaotic maps and coupled master-slave generators.
//! - [`chaosfex`]: GLS-neuron firing and the four ChaosFEX features.
//! - [`chaosnet`]: cosine-similarity prototype classifier and `q` tuning.
//! - [`causality`]: Granger causality and compression-complexity causality.
//! - [`mlp`]: dense feed-forward baseline trained with backpropagation.
//! - [`harness`]: dataset splits, sweeps, transfer cases and CSV output.

pub mod causality;
pub mod chaosfex;
pub mod chaosnet;
pub mod dataset;
pub mod dynamics;
pub mod harness;
pub mod mlp;
mod error;

pub use chaosfex::{FeatureMatrix, FeatureVector, NeurochaosConfig, Normalization};
pub use chaosnet::{ChaosNetModel, EvaluationReport, NormalizationMode};
pub use dataset::Dataset;
pub use dynamics::{CoupledArConfig, CoupledMapConfig, TimeSeriesPair};
pub use mlp::{MlpArchitecture, MlpModel, TrainingConfig};
pub use error::{Error, Result};
