//! Experiment orchestration: data generation, splits, sweeps, transfer
//! cases, causality experiments and result files.

mod experiments;
mod io;
mod split;

use serde::{Deserialize, Serialize};

use crate::causality::{CccConfig, GcConfig};
use crate::chaosfex::NeurochaosConfig;
use crate::chaosnet::NormalizationMode;
use crate::dynamics::{
    generate_coupled_ar_pair, generate_coupled_map_pair, trial_seed, ChaoticMap, CoupledArConfig,
    CoupledMapConfig, TimeSeriesPair,
};
use crate::error::{Error, Result};
use crate::mlp::{Activation, MlpArchitecture, TrainingConfig};

pub use experiments::{
    causality_rows, ccc_on_pairs, gc_on_pairs, run_ccc_experiment, run_eta_sweep, run_gc_experiment,
    run_transfer_case, run_transfer_cases, train_mlp, CausalityPoint, CccSource, GcFeature, TransferCase,
    TrialFailure,
};
pub use io::{
    export_results, load_config, load_prey_predator, manifest_path, prey_predator_ccc, read_results,
    read_trial_dir, write_trial_dir, Manifest, PreyPredatorReport,
};
pub use split::{pairs_dataset, split_train_test, train_counts, DatasetSplit};

/// Data-generating system for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    CoupledMaps { master: ChaoticMap, slave: ChaoticMap },
    CoupledAr { a1: f64, a2: f64, gamma: f64 },
}

impl SystemSpec {
    /// Skew-tent pair with b1 = 0.65, b2 = 0.47.
    pub fn skew_tent() -> Self {
        Self::tent_pair(0.65, 0.47)
    }

    pub fn tent_pair(b1: f64, b2: f64) -> Self {
        SystemSpec::CoupledMaps {
            master: ChaoticMap::SkewTent { b: b1 },
            slave: ChaoticMap::SkewTent { b: b2 },
        }
    }

    /// Logistic pair with A1 = 4.0, A2 = 3.82.
    pub fn logistic() -> Self {
        SystemSpec::CoupledMaps {
            master: ChaoticMap::Logistic { a: 4.0 },
            slave: ChaoticMap::Logistic { a: 3.82 },
        }
    }

    pub fn coupled_ar() -> Self {
        SystemSpec::CoupledAr {
            a1: 0.8,
            a2: 0.9,
            gamma: 0.03,
        }
    }

    /// One trial at coupling `eta`.
    pub fn generate_trial(&self, eta: f64, seed: u64, length: usize, transient: usize) -> Result<TimeSeriesPair> {
        match *self {
            SystemSpec::CoupledMaps { master, slave } => generate_coupled_map_pair(&CoupledMapConfig {
                master_map: master,
                slave_map: slave,
                eta,
                length,
                transient,
                seed,
            }),
            SystemSpec::CoupledAr { a1, a2, gamma } => generate_coupled_ar_pair(&CoupledArConfig {
                a1,
                a2,
                gamma,
                eta,
                length,
                transient,
                seed,
                initial: None,
            }),
        }
    }

    /// `trials` pairs; trial `i` is seeded with `trial_seed(base_seed, i)`.
    pub fn generate(
        &self,
        eta: f64,
        trials: usize,
        base_seed: u64,
        length: usize,
        transient: usize,
    ) -> Result<Vec<TimeSeriesPair>> {
        use rayon::prelude::*;
        (0..trials as u64)
            .into_par_iter()
            .map(|i| self.generate_trial(eta, trial_seed(base_seed, i), length, transient))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Chaosnet,
    Mlp,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Chaosnet => "chaosnet",
            Method::Mlp => "mlp",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chaosnet" => Ok(Method::Chaosnet),
            "mlp" => Ok(Method::Mlp),
            other => Err(Error::Unknown {
                kind: "method",
                value: other.to_string(),
            }),
        }
    }
}

/// One evaluated (case, eta, method) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// `train` for plain sweeps, otherwise the transfer case (`I` .. `IV`).
    pub case: String,
    pub eta: f64,
    pub method: Method,
    pub macro_f1: f64,
    /// Generation seed of the evaluated data.
    pub seed: u64,
}

/// One per-trial causality value, the `trial,eta,direction,statistic` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityRow {
    pub trial: usize,
    pub eta: f64,
    pub direction: String,
    pub statistic: f64,
}

/// Baseline network settings used by the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpSettings {
    /// Hidden widths; the first layer is sigmoid, the rest relu.
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub init_seed: u64,
    /// 1-based hidden layer whose activations feed the GC experiment.
    pub feature_layer: usize,
}

impl Default for MlpSettings {
    fn default() -> Self {
        let t = TrainingConfig::default();
        Self {
            hidden: vec![5000, 500, 100, 30],
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            init_seed: 0,
            feature_layer: 4,
        }
    }
}

impl MlpSettings {
    pub fn architecture(&self, input: usize, classes: usize) -> Result<MlpArchitecture> {
        let mut sizes = Vec::with_capacity(self.hidden.len() + 2);
        sizes.push(input);
        sizes.extend_from_slice(&self.hidden);
        sizes.push(classes);
        let activations = (0..=self.hidden.len())
            .map(|i| match i {
                _ if i == self.hidden.len() => Activation::Softmax,
                0 => Activation::Sigmoid,
                _ => Activation::Relu,
            })
            .collect();
        MlpArchitecture::new(sizes, activations)
    }

    pub fn training(&self, seed: u64) -> TrainingConfig {
        TrainingConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            seed,
            ..TrainingConfig::default()
        }
    }
}

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub etas: Vec<f64>,
    /// Trials per eta for classification sweeps.
    pub trials: usize,
    /// Data for eta index `i` is generated from `seed + i`.
    pub seed: u64,
    pub length: usize,
    pub transient: usize,
    pub normalization: NormalizationMode,
    pub neurochaos: NeurochaosConfig,
    pub mlp: MlpSettings,
    /// Trials per eta for the causality experiments.
    pub causality_trials: usize,
    pub gc: GcConfig,
    /// GC settings for hidden-layer features of the baseline network.
    pub gc_hidden: GcConfig,
    /// CCC on raw series.
    pub ccc: CccConfig,
    /// CCC on firing-time series.
    pub ccc_firing: CccConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SystemSpec::skew_tent(),
            etas: eta_grid(9),
            trials: 1000,
            seed: 42,
            length: 2000,
            transient: 500,
            normalization: NormalizationMode::PerInstance,
            neurochaos: NeurochaosConfig::default(),
            mlp: MlpSettings::default(),
            causality_trials: 50,
            gc: GcConfig::default(),
            gc_hidden: GcConfig::with_max_order(20),
            ccc: CccConfig::default(),
            ccc_firing: CccConfig::new(120, 15, 60, 2),
        }
    }
}

/// `0.0, 0.1, ..., last / 10`.
pub fn eta_grid(last: u32) -> Vec<f64> {
    (0..=last).map(|i| f64::from(i) / 10.0).collect()
}

impl ExperimentConfig {
    /// Generation seed for the `index`-th eta.
    pub fn eta_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.etas.is_empty() {
            return Err(Error::config("eta grid is empty"));
        }
        if let Some(bad) = self.etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::config(format!("eta {bad} outside [0, 1]")));
        }
        if self.trials == 0 || self.causality_trials == 0 || self.length == 0 {
            return Err(Error::config("trial counts and length must be >= 1"));
        }
        self.neurochaos.validate()?;
        self.gc.validate()?;
        self.gc_hidden.validate()?;
        self.ccc.validate()?;
        self.ccc_firing.validate()
    }
}
