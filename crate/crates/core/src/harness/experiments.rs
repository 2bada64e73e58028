use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::split_train_test;
use super::{CausalityRow, ExperimentConfig, Method, ResultRow, SystemSpec};
use crate::causality::{ccc, granger, CausalityReport, CccConfig, Direction, GcConfig};
use crate::chaosfex::{firing_times, Normalization, NeurochaosConfig};
use crate::chaosnet::{self, NormalizationMode};
use crate::dataset::Dataset;
use crate::dynamics::{trial_seed, TimeSeriesPair};
use crate::error::{Error, Result};
use crate::mlp::MlpModel;

/// Offset separating the baseline network's training data from the trials
/// whose hidden features are tested.
const MLP_DATA_OFFSET: u64 = 1 << 32;

/// Baseline network built from `config.mlp`, normalized per
/// `config.normalization` and trained in single precision with shuffle seed `seed`.
pub fn train_mlp(train: &Dataset, config: &ExperimentConfig, seed: u64) -> Result<MlpModel<f32>> {
    let arch = config.mlp.architecture(train.instance_len(), train.num_classes().max(2))?;
    let norm = config.normalization.fit(train)?;
    let mut model = MlpModel::<f32>::new(arch, config.mlp.init_seed)?.with_normalization(norm);
    let report = model.train(train, &config.mlp.training(seed))?;
    log::info!(
        "mlp trained: final loss {:.5}",
        report.loss_curve.last().copied().unwrap_or(f64::NAN)
    );
    Ok(model)
}

/// Fits `method` on `train` and returns the macro F1 on each test set.
fn fit_and_score(
    method: Method,
    train: &Dataset,
    tests: &[&Dataset],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    match method {
        Method::Chaosnet => {
            let model = chaosnet::fit(train, config.neurochaos, config.normalization)?;
            tests.iter().map(|t| Ok(model.evaluate(t)?.macro_f1)).collect()
        }
        Method::Mlp => {
            let model = train_mlp(train, config, seed)?;
            tests.iter().map(|t| Ok(model.evaluate(t)?.macro_f1)).collect()
        }
    }
}

/// Macro F1 against eta for `method` on `config.system`.
pub fn run_eta_sweep(config: &ExperimentConfig, method: Method) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.etas.len());
    for (i, &eta) in config.etas.iter().enumerate() {
        let seed = config.eta_seed(i);
        let pairs = config
            .system
            .generate(eta, config.trials, seed, config.length, config.transient)?;
        let split = split_train_test(&pairs, seed)?;
        let f1 = fit_and_score(method, &split.train, &[&split.test], config, seed)?[0];
        log::info!("eta {eta:.2} {}: macro F1 {f1:.4}", method.label());
        rows.push(ResultRow {
            case: "train".into(),
            eta,
            method,
            macro_f1: f1,
            seed,
        });
    }
    Ok(rows)
}

/// Test systems for models trained on the b1 = 0.65, b2 = 0.47 tent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransferCase {
    I,
    II,
    III,
    IV,
}

impl TransferCase {
    pub const ALL: [TransferCase; 4] = [TransferCase::I, TransferCase::II, TransferCase::III, TransferCase::IV];

    pub fn system(&self) -> SystemSpec {
        match self {
            TransferCase::I => SystemSpec::tent_pair(0.6, 0.4),
            TransferCase::II => SystemSpec::tent_pair(0.1, 0.3),
            TransferCase::III => SystemSpec::tent_pair(0.49, 0.52),
            TransferCase::IV => SystemSpec::logistic(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TransferCase::I => "I",
            TransferCase::II => "II",
            TransferCase::III => "III",
            TransferCase::IV => "IV",
        }
    }

    fn index(&self) -> u64 {
        *self as u64
    }
}

impl std::str::FromStr for TransferCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(TransferCase::I),
            "II" | "2" => Ok(TransferCase::II),
            "III" | "3" => Ok(TransferCase::III),
            "IV" | "4" => Ok(TransferCase::IV),
            _ => Err(Error::Unknown {
                kind: "transfer case",
                value: s.to_string(),
            }),
        }
    }
}

/// Trains once per eta on the reference tent pair and scores every case
/// on the test portion of its own freshly generated data.
pub fn run_transfer_cases(
    cases: &[TransferCase],
    methods: &[Method],
    config: &ExperimentConfig,
) -> Result<Vec<ResultRow>> {
    config.validate()?;
    if cases.is_empty() || methods.is_empty() {
        return Err(Error::config("transfer needs at least one case and one method"));
    }
    let reference = SystemSpec::skew_tent();
    let mut rows = Vec::new();
    for (i, &eta) in config.etas.iter().enumerate() {
        let seed = config.eta_seed(i);
        let pairs = reference.generate(eta, config.trials, seed, config.length, config.transient)?;
        let split = split_train_test(&pairs, seed)?;
        let mut tests = Vec::with_capacity(cases.len());
        for case in cases {
            let case_seed = trial_seed(seed, 1 + case.index());
            let target = case
                .system()
                .generate(eta, config.trials, case_seed, config.length, config.transient)?;
            tests.push((case_seed, split_train_test(&target, case_seed)?.test));
        }
        let refs: Vec<&Dataset> = tests.iter().map(|(_, t)| t).collect();
        for &method in methods {
            let scores = fit_and_score(method, &split.train, &refs, config, seed)?;
            for ((case, (case_seed, _)), f1) in cases.iter().zip(&tests).zip(scores) {
                log::info!("case {} eta {eta:.2} {}: macro F1 {f1:.4}", case.label(), method.label());
                rows.push(ResultRow {
                    case: case.label().into(),
                    eta,
                    method,
                    macro_f1: f1,
                    seed: *case_seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn run_transfer_case(case: TransferCase, methods: &[Method], config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_transfer_cases(&[case], methods, config)
}

/// A trial/direction that produced no value, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub eta: f64,
    pub trial: usize,
    pub direction: String,
    pub reason: String,
}

/// Both directions of one statistic at one coupling strength.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalityPoint {
    pub eta: f64,
    pub rows: Vec<CausalityRow>,
    pub master_to_slave: Option<CausalityReport>,
    pub slave_to_master: Option<CausalityReport>,
    pub failures: Vec<TrialFailure>,
}

impl CausalityPoint {
    pub fn report(&self, direction: Direction) -> Option<&CausalityReport> {
        match direction {
            Direction::MasterToSlave => self.master_to_slave.as_ref(),
            Direction::SlaveToMaster => self.slave_to_master.as_ref(),
        }
    }
}

pub fn causality_rows(points: &[CausalityPoint]) -> Vec<CausalityRow> {
    points.iter().flat_map(|p| p.rows.iter().cloned()).collect()
}

/// Applies `stat(cause, effect)` in both directions to every trial's
/// feature pair; failures are collected rather than propagated.
fn directional<S>(
    eta: f64,
    features: Vec<Result<(Vec<f64>, Vec<f64>)>>,
    name: &'static str,
    stat: S,
) -> Result<CausalityPoint>
where
    S: Fn(&[f64], &[f64]) -> Result<f64> + Sync,
{
    let per_trial: Vec<[Result<f64>; 2]> = features
        .par_iter()
        .map(|f| match f {
            Ok((m, s)) => [stat(m, s), stat(s, m)],
            Err(e) => {
                let msg = e.to_string();
                [Err(Error::config(msg.clone())), Err(Error::config(msg))]
            }
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut values = [Vec::new(), Vec::new()];
    for (trial, results) in per_trial.into_iter().enumerate() {
        for (d, (direction, r)) in [Direction::MasterToSlave, Direction::SlaveToMaster]
            .into_iter()
            .zip(results)
            .enumerate()
        {
            match r {
                Ok(v) => {
                    values[d].push(v);
                    rows.push(CausalityRow {
                        trial,
                        eta,
                        direction: direction.label().into(),
                        statistic: v,
                    });
                }
                Err(e) => {
                    log::warn!("eta {eta:.2} trial {trial} {direction}: {e}");
                    failures.push(TrialFailure {
                        eta,
                        trial,
                        direction: direction.label().into(),
                        reason: e.to_string(),
                    });
                }
            }
        }
    }
    let [ms, sm] = values;
    let report = |d, v: Vec<f64>| {
        if v.is_empty() {
            Ok(None)
        } else {
            CausalityReport::new(d, name, v).map(Some)
        }
    };
    Ok(CausalityPoint {
        eta,
        rows,
        master_to_slave: report(Direction::MasterToSlave, ms)?,
        slave_to_master: report(Direction::SlaveToMaster, sm)?,
        failures,
    })
}

/// Series each causality measure is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GcFeature {
    Raw,
    ChaosfexFiringTime,
    /// Hidden-layer activations of the baseline network.
    MlpHidden,
}

/// Source series for CCC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CccSource {
    Raw,
    ChaosfexFiringTime,
}

/// Firing-time series of both members of a pair. Per-instance mode scales
/// each series by its own extremes, range mode by the pair's joint range.
fn pair_firing_times(
    pair: &TimeSeriesPair,
    config: &NeurochaosConfig,
    mode: NormalizationMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let norm = match mode {
        NormalizationMode::PerInstance => Normalization::PerInstance,
        NormalizationMode::TrainingRange => {
            Normalization::fit_range([pair.master.as_slice(), pair.slave.as_slice()])?
        }
    };
    Ok((
        firing_times(&norm.apply(&pair.master)?, config)?,
        firing_times(&norm.apply(&pair.slave)?, config)?,
    ))
}

fn raw_or_firing(
    pairs: &[TimeSeriesPair],
    firing: Option<(&NeurochaosConfig, NormalizationMode)>,
) -> Vec<Result<(Vec<f64>, Vec<f64>)>> {
    pairs
        .par_iter()
        .map(|p| match firing {
            None => Ok((p.master.clone(), p.slave.clone())),
            Some((cfg, mode)) => pair_firing_times(p, cfg, mode),
        })
        .collect()
}

fn gc_statistic(gc: GcConfig) -> impl Fn(&[f64], &[f64]) -> Result<f64> + Sync {
    move |x, y| Ok(granger(x, y, &gc)?.f_statistic)
}

/// GC F-statistics for `pairs` on raw or firing-time series.
pub fn gc_on_pairs(
    eta: f64,
    pairs: &[TimeSeriesPair],
    firing: Option<(&NeurochaosConfig, NormalizationMode)>,
    gc: &GcConfig,
) -> Result<CausalityPoint> {
    gc.validate()?;
    directional(eta, raw_or_firing(pairs, firing), "F", gc_statistic(*gc))
}

/// CCC values for `pairs` on raw or firing-time series.
pub fn ccc_on_pairs(
    eta: f64,
    pairs: &[TimeSeriesPair],
    firing: Option<(&NeurochaosConfig, NormalizationMode)>,
    config: &CccConfig,
) -> Result<CausalityPoint> {
    config.validate()?;
    let cfg = *config;
    directional(eta, raw_or_firing(pairs, firing), "CCC", move |x, y| ccc(x, y, &cfg))
}

/// GC in both directions per eta over `causality_trials` trials.
pub fn run_gc_experiment(feature: GcFeature, config: &ExperimentConfig) -> Result<Vec<CausalityPoint>> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.etas.len());
    for (i, &eta) in config.etas.iter().enumerate() {
        let seed = config.eta_seed(i);
        let pairs = config
            .system
            .generate(eta, config.causality_trials, seed, config.length, config.transient)?;
        let point = match feature {
            GcFeature::Raw => gc_on_pairs(eta, &pairs, None, &config.gc)?,
            GcFeature::ChaosfexFiringTime => gc_on_pairs(
                eta,
                &pairs,
                Some((&config.neurochaos, config.normalization)),
                &config.gc,
            )?,
            GcFeature::MlpHidden => {
                let train_seed = seed.wrapping_add(MLP_DATA_OFFSET);
                let train_pairs = config
                    .system
                    .generate(eta, config.trials, train_seed, config.length, config.transient)?;
                let split = split_train_test(&train_pairs, train_seed)?;
                let model = train_mlp(&split.train, config, train_seed)?;
                let layer = config.mlp.feature_layer;
                let hidden = |raw: &[f64]| -> Result<Vec<f64>> {
                    let h = model.hidden_activations(&model.prepare(raw)?, layer)?;
                    Ok(h.into_iter().map(f64::from).collect())
                };
                let features: Vec<Result<(Vec<f64>, Vec<f64>)>> = pairs
                    .iter()
                    .map(|p| Ok((hidden(&p.master)?, hidden(&p.slave)?)))
                    .collect();
                let width = model.architecture.sizes[layer];
                // orders beyond this leave no residual degrees of freedom
                let feasible = width.saturating_sub(3) / 2;
                let mut gc = config.gc_hidden;
                if gc.max_order > feasible {
                    log::warn!(
                        "max order {} infeasible on {width}-point hidden features, using {feasible}",
                        gc.max_order
                    );
                    gc.max_order = feasible;
                }
                gc.validate()?;
                directional(eta, features, "F", gc_statistic(gc))?
            }
        };
        log_point("GC", &point);
        points.push(point);
    }
    Ok(points)
}

/// CCC in both directions per eta over `causality_trials` trials.
pub fn run_ccc_experiment(source: CccSource, config: &ExperimentConfig) -> Result<Vec<CausalityPoint>> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.etas.len());
    for (i, &eta) in config.etas.iter().enumerate() {
        let pairs = config.system.generate(
            eta,
            config.causality_trials,
            config.eta_seed(i),
            config.length,
            config.transient,
        )?;
        let point = match source {
            CccSource::Raw => ccc_on_pairs(eta, &pairs, None, &config.ccc)?,
            CccSource::ChaosfexFiringTime => ccc_on_pairs(
                eta,
                &pairs,
                Some((&config.neurochaos, config.normalization)),
                &config.ccc_firing,
            )?,
        };
        log_point("CCC", &point);
        points.push(point);
    }
    Ok(points)
}

fn log_point(name: &str, p: &CausalityPoint) {
    let mean = |r: &Option<CausalityReport>| r.as_ref().map_or(f64::NAN, |r| r.mean);
    log::info!(
        "{name} eta {:.2}: master->slave {:.4}, slave->master {:.4}, {} failures",
        p.eta,
        mean(&p.master_to_slave),
        mean(&p.slave_to_master),
        p.failures.len()
    );
}
