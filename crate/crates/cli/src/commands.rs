use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use neurochaos::causality::CccConfig;
use neurochaos::chaosfex::{transform_instance, NeurochaosConfig, Normalization};
use neurochaos::chaosnet::{self, default_q_grid, tune_q, ChaosNetModel, NormalizationMode};
use neurochaos::dynamics::{SystemTag, TimeSeriesPair};
use neurochaos::harness::*;
use neurochaos::mlp::{MlpModel, Scalar};
use neurochaos::{Dataset, EvaluationReport};
use serde::Serialize;

use crate::{
    ActivationsArgs, CccArgs, Command, EvaluateArgs, FeatureArg, FeaturesArgs, GcArgs, GenerateArgs,
    Overrides, Part, PreyPredatorArgs, Selection, SweepArgs, SystemArg, TrainArgs, TransferArgs, TuneArgs,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Features(a) => features(a),
        Command::Train(a) => train(a),
        Command::Evaluate(a) => evaluate(a),
        Command::MlpTrain(a) => mlp_train(a),
        Command::MlpEval(a) => mlp_eval(a),
        Command::MlpActivations(a) => mlp_activations(a),
        Command::Gc(a) => gc(a),
        Command::Ccc(a) => ccc(a),
        Command::Tune(a) => tune(a),
        Command::Sweep(a) => sweep(a),
        Command::Transfer(a) => transfer(a),
        Command::PreyPredator(a) => prey_predator(a),
    }
}

fn config_or_default(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => load_config(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(ExperimentConfig::default()),
    }
}

fn apply_overrides(o: &Overrides) -> Result<ExperimentConfig> {
    let mut config = config_or_default(o.config.as_deref())?;
    if let Some(etas) = &o.etas {
        config.etas = etas.clone();
    }
    if let Some(t) = o.trials {
        config.trials = t;
        config.causality_trials = t;
    }
    if let Some(s) = o.seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn generate(a: GenerateArgs) -> Result<()> {
    let system = match a.system {
        SystemArg::Ar => SystemSpec::coupled_ar(),
        SystemArg::Tent => SystemSpec::skew_tent(),
        SystemArg::Logistic => SystemSpec::logistic(),
    };
    let config = ExperimentConfig {
        system,
        etas: a.eta.clone(),
        trials: a.trials,
        seed: a.seed,
        length: a.length,
        transient: a.transient,
        ..ExperimentConfig::default()
    };
    config.validate()?;
    let mut manifest = Manifest::new("generate").with_config(&config);
    for (i, &eta) in config.etas.iter().enumerate() {
        let seed = config.eta_seed(i);
        let pairs = system.generate(eta, a.trials, seed, a.length, a.transient)?;
        write_trial_dir(&a.out, eta, &pairs)?;
        manifest.seeds.push(seed);
    }
    manifest.save(&a.out.join("manifest.toml"))?;
    println!("wrote {} x {} trials to {}", config.etas.len(), a.trials, a.out.display());
    Ok(())
}

#[derive(Serialize)]
struct FeatureRow {
    idx: usize,
    firing_time: usize,
    firing_rate: f64,
    energy: f64,
    entropy: f64,
}

/// Per-series normalization for a pair: each series by its own extremes,
/// or both by the pair's joint range.
fn pair_normalization(pair: &TimeSeriesPair, mode: NormalizationMode) -> Result<Normalization> {
    Ok(match mode {
        NormalizationMode::PerInstance => Normalization::PerInstance,
        NormalizationMode::TrainingRange => {
            Normalization::fit_range([pair.master.as_slice(), pair.slave.as_slice()])?
        }
    })
}

fn features(a: FeaturesArgs) -> Result<()> {
    let config = config_or_default(a.config.as_deref())?;
    let groups = read_trial_dir(&a.input)?;
    let mut files = 0;
    for (eta, pairs) in &groups {
        let dir = a.out.join(format!("eta_{eta:.2}"));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for (trial, pair) in pairs.iter().enumerate() {
            let norm = pair_normalization(pair, config.normalization)?;
            for (role, series) in [("master", &pair.master), ("slave", &pair.slave)] {
                let m = transform_instance(&norm.apply(series)?, &config.neurochaos)?;
                let path = dir.join(format!("trial_{trial:04}_{role}.csv"));
                let mut w = csv::Writer::from_path(&path)?;
                for (idx, f) in m.rows.iter().enumerate() {
                    w.serialize(FeatureRow {
                        idx,
                        firing_time: f.firing_time,
                        firing_rate: f.firing_rate,
                        energy: f.energy,
                        entropy: f.entropy,
                    })?;
                }
                w.flush()?;
                files += 1;
            }
        }
    }
    Manifest::new("features")
        .with_config(&config)
        .parameter("input", a.input.display())
        .save(&a.out.join("manifest.toml"))?;
    println!("wrote {files} feature files to {}", a.out.display());
    Ok(())
}

/// Instances of a trial directory chosen by `--eta` and `--part`.
fn select(dir: &Path, s: &Selection) -> Result<Dataset> {
    let mut groups = read_trial_dir(dir)?;
    if let Some(eta) = s.eta {
        groups.retain(|(e, _)| (e - eta).abs() < 1e-9);
        if groups.is_empty() {
            bail!("no eta_{eta:.2} subdirectory in {}", dir.display());
        }
    }
    let mut data = Dataset::default();
    for (_, pairs) in &groups {
        let part = match s.part {
            Part::All => pairs_dataset(pairs)?,
            Part::Train => split_train_test(pairs, s.split_seed)?.train,
            Part::Test => split_train_test(pairs, s.split_seed)?.test,
        };
        data.instances.extend(part.instances);
        data.labels.extend(part.labels);
    }
    Ok(Dataset::new(data.instances, data.labels)?)
}

fn selection_manifest(m: Manifest, dir: &Path, s: &Selection) -> Manifest {
    let m = m
        .parameter("data", dir.display())
        .parameter("part", format!("{:?}", s.part).to_lowercase())
        .parameter("split_seed", s.split_seed);
    match s.eta {
        Some(eta) => m.parameter("eta", eta),
        None => m,
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let config = config_or_default(a.config.as_deref())?;
    let data = select(&a.train, &a.selection)?;
    let model = chaosnet::fit(&data, config.neurochaos, config.normalization)?;
    model.save(&a.model)?;
    selection_manifest(Manifest::new("train").with_config(&config), &a.train, &a.selection)
        .parameter("instances", data.len())
        .save(&manifest_path(&a.model))?;
    println!("trained on {} instances, model at {}", data.len(), a.model.display());
    Ok(())
}

#[derive(Serialize)]
struct ReportRow {
    class: String,
    precision: f64,
    recall: f64,
    f1: f64,
    support: usize,
}

fn write_report(report: &EvaluationReport, path: &Path, manifest: Manifest) -> Result<()> {
    let mut rows: Vec<ReportRow> = (0..report.f1.len())
        .map(|k| ReportRow {
            class: k.to_string(),
            precision: report.precision[k],
            recall: report.recall[k],
            f1: report.f1[k],
            support: report.confusion[k].iter().sum(),
        })
        .collect();
    let n = rows.len().max(1) as f64;
    rows.push(ReportRow {
        class: "macro".into(),
        precision: report.precision.iter().sum::<f64>() / n,
        recall: report.recall.iter().sum::<f64>() / n,
        f1: report.macro_f1,
        support: rows.iter().map(|r| r.support).sum(),
    });
    export_results(&rows, path, &manifest)?;
    println!("macro F1 {:.4}, accuracy {:.4}", report.macro_f1, report.accuracy());
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let model = ChaosNetModel::load(&a.model)?;
    let data = select(&a.test, &a.selection)?;
    let report = model.evaluate(&data)?;
    let manifest = selection_manifest(Manifest::new("evaluate"), &a.test, &a.selection)
        .parameter("model", a.model.display());
    write_report(&report, &a.report, manifest)
}

fn mlp_train(a: TrainArgs) -> Result<()> {
    let config = config_or_default(a.config.as_deref())?;
    let data = select(&a.train, &a.selection)?;
    let model = train_mlp(&data, &config, config.seed)?;
    model.save(&a.model)?;
    let mut manifest = selection_manifest(Manifest::new("mlp-train").with_config(&config), &a.train, &a.selection)
        .parameter("instances", data.len())
        .parameter("parameters", model.parameter_count());
    manifest.seeds = vec![config.seed];
    manifest.save(&manifest_path(&a.model))?;
    println!("trained on {} instances, model at {}", data.len(), a.model.display());
    Ok(())
}

/// A stored network in either precision.
enum AnyMlp {
    Single(MlpModel<f32>),
    Double(MlpModel<f64>),
}

impl AnyMlp {
    fn load(path: &Path) -> Result<Self> {
        match MlpModel::<f32>::load(path) {
            Ok(m) => Ok(AnyMlp::Single(m)),
            Err(single) => MlpModel::<f64>::load(path)
                .map(AnyMlp::Double)
                .with_context(|| format!("not a single-precision model either: {single}")),
        }
    }

    fn evaluate(&self, data: &Dataset) -> Result<EvaluationReport> {
        Ok(match self {
            AnyMlp::Single(m) => m.evaluate(data)?,
            AnyMlp::Double(m) => m.evaluate(data)?,
        })
    }

    fn hidden(&self, raw: &[f64], layer: usize) -> Result<Vec<f64>> {
        fn go<F: Scalar>(m: &MlpModel<F>, raw: &[f64], layer: usize) -> Result<Vec<f64>> {
            let h = m.hidden_activations(&m.prepare(raw)?, layer)?;
            Ok(h.into_iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
        }
        match self {
            AnyMlp::Single(m) => go(m, raw, layer),
            AnyMlp::Double(m) => go(m, raw, layer),
        }
    }

    fn width(&self, layer: usize) -> Option<usize> {
        let sizes = match self {
            AnyMlp::Single(m) => &m.architecture.sizes,
            AnyMlp::Double(m) => &m.architecture.sizes,
        };
        sizes.get(layer).copied()
    }
}

fn mlp_eval(a: EvaluateArgs) -> Result<()> {
    let model = AnyMlp::load(&a.model)?;
    let data = select(&a.test, &a.selection)?;
    let report = model.evaluate(&data)?;
    let manifest = selection_manifest(Manifest::new("mlp-eval"), &a.test, &a.selection)
        .parameter("model", a.model.display());
    write_report(&report, &a.report, manifest)
}

fn mlp_activations(a: ActivationsArgs) -> Result<()> {
    let model = AnyMlp::load(&a.model)?;
    let data = select(&a.test, &a.selection)?;
    let width = model.width(a.layer).context("layer index beyond the network")?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(&a.out)?;
    let mut header = vec!["instance".to_string(), "label".to_string()];
    header.extend((0..width).map(|j| format!("h{j}")));
    w.write_record(&header)?;
    for (i, (raw, label)) in data.iter().enumerate() {
        let h = model.hidden(raw, a.layer)?;
        let mut record = vec![i.to_string(), label.to_string()];
        record.extend(h.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    selection_manifest(Manifest::new("mlp-activations"), &a.test, &a.selection)
        .parameter("model", a.model.display())
        .parameter("layer", a.layer)
        .save(&manifest_path(&a.out))?;
    println!("wrote {} x {width} activations to {}", data.len(), a.out.display());
    Ok(())
}

fn export_points(points: &[CausalityPoint], command: &str, config: &ExperimentConfig, out: &Path, manifest: Manifest) -> Result<()> {
    for p in points {
        let mean = |d| p.report(d).map_or(f64::NAN, |r| r.mean);
        println!(
            "eta {:.2}: master->slave {:.4}, slave->master {:.4} ({} failures)",
            p.eta,
            mean(neurochaos::causality::Direction::MasterToSlave),
            mean(neurochaos::causality::Direction::SlaveToMaster),
            p.failures.len()
        );
    }
    let mut manifest = manifest.with_config(config);
    manifest.command = command.into();
    manifest.failures = points.iter().flat_map(|p| p.failures.iter().cloned()).collect();
    export_results(&causality_rows(points), out, &manifest)?;
    Ok(())
}

fn gc(a: GcArgs) -> Result<()> {
    let mut config = config_or_default(a.config.as_deref())?;
    if let Some(m) = a.max_order {
        config.gc.max_order = m;
        config.gc_hidden.max_order = m;
    }
    config.validate()?;
    let groups = read_trial_dir(&a.dir)?;
    let model = match (a.feature, &a.model) {
        (FeatureArg::MlpHidden, Some(path)) => Some(AnyMlp::load(path)?),
        (FeatureArg::MlpHidden, None) => bail!("--feature mlp-hidden needs --model"),
        _ => None,
    };
    let layer = a.layer.unwrap_or(config.mlp.feature_layer);
    let mut points = Vec::with_capacity(groups.len());
    for (eta, pairs) in &groups {
        let point = match a.feature {
            FeatureArg::Raw => gc_on_pairs(*eta, pairs, None, &config.gc)?,
            FeatureArg::FiringTime => {
                gc_on_pairs(*eta, pairs, Some((&config.neurochaos, config.normalization)), &config.gc)?
            }
            FeatureArg::MlpHidden => {
                let model = model.as_ref().expect("checked above");
                let hidden = pairs
                    .iter()
                    .map(|p| {
                        TimeSeriesPair::new(
                            model.hidden(&p.master, layer)?,
                            model.hidden(&p.slave, layer)?,
                            SystemTag::External,
                        )
                        .map_err(anyhow::Error::from)
                    })
                    .collect::<Result<Vec<_>>>()?;
                gc_on_pairs(*eta, &hidden, None, &config.gc_hidden)?
            }
        };
        points.push(point);
    }
    let manifest = Manifest::new("gc")
        .parameter("dir", a.dir.display())
        .parameter("feature", format!("{:?}", a.feature));
    export_points(&points, "gc", &config, &a.out, manifest)
}

fn ccc(a: CccArgs) -> Result<()> {
    let mut config = config_or_default(a.config.as_deref())?;
    let base = match a.source {
        FeatureArg::Raw => config.ccc,
        FeatureArg::FiringTime => config.ccc_firing,
        FeatureArg::MlpHidden => bail!("CCC runs on raw or firing-time series only"),
    };
    let cfg = CccConfig::new(
        a.past.unwrap_or(base.past),
        a.step.unwrap_or(base.step),
        a.delta.unwrap_or(base.future),
        a.bins.unwrap_or(base.bins),
    );
    cfg.validate()?;
    match a.source {
        FeatureArg::Raw => config.ccc = cfg,
        _ => config.ccc_firing = cfg,
    }
    let firing = (a.source == FeatureArg::FiringTime).then_some((&config.neurochaos, config.normalization));
    let points = read_trial_dir(&a.dir)?
        .iter()
        .map(|(eta, pairs)| ccc_on_pairs(*eta, pairs, firing, &cfg))
        .collect::<neurochaos::Result<Vec<_>>>()?;
    let manifest = Manifest::new("ccc")
        .parameter("dir", a.dir.display())
        .parameter("source", format!("{:?}", a.source));
    export_points(&points, "ccc", &config, &a.out, manifest)
}

#[derive(Serialize)]
struct TuneRow {
    q: f64,
    mean_macro_f1: f64,
}

fn tune(a: TuneArgs) -> Result<()> {
    let config = apply_overrides(&a.overrides)?;
    let pairs = config
        .system
        .generate(a.eta, config.trials, config.seed, config.length, config.transient)?;
    let train = split_train_test(&pairs, config.seed)?.train;
    let result = tune_q(&train, config.neurochaos, &default_q_grid(), config.normalization, config.seed)?;
    let rows: Vec<TuneRow> = result
        .table
        .iter()
        .map(|r| TuneRow {
            q: r.q,
            mean_macro_f1: r.mean_macro_f1,
        })
        .collect();
    let mut manifest = Manifest::new("tune")
        .with_config(&config)
        .parameter("eta", a.eta)
        .parameter("best_q", result.best_q)
        .parameter("best_score", result.best_score);
    manifest.seeds = vec![config.seed];
    export_results(&rows, &a.out, &manifest)?;
    println!("best mean macro F1 {:.4} at q = {:?}", result.best_score, result.maximizers);
    Ok(())
}

fn result_manifest(command: &str, config: &ExperimentConfig, rows: &[ResultRow]) -> Manifest {
    let mut manifest = Manifest::new(command).with_config(config);
    manifest.seeds = rows.iter().map(|r| r.seed).collect();
    manifest
}

fn print_rows(rows: &[ResultRow]) {
    for r in rows {
        println!("{:>5} eta {:.2} {:>8}: macro F1 {:.4}", r.case, r.eta, r.method.label(), r.macro_f1);
    }
}

fn sweep(a: SweepArgs) -> Result<()> {
    let config = apply_overrides(&a.overrides)?;
    let rows = run_eta_sweep(&config, a.method)?;
    print_rows(&rows);
    export_results(&rows, &a.out, &result_manifest("sweep", &config, &rows))?;
    Ok(())
}

fn transfer(a: TransferArgs) -> Result<()> {
    let config = apply_overrides(&a.overrides)?;
    let cases = if a.case.is_empty() { TransferCase::ALL.to_vec() } else { a.case.clone() };
    let rows = run_transfer_cases(&cases, &a.method, &config)?;
    print_rows(&rows);
    export_results(&rows, &a.out, &result_manifest("transfer", &config, &rows))?;
    Ok(())
}

#[derive(Serialize)]
struct PreyPredatorRow {
    series: &'static str,
    direction: &'static str,
    ccc: f64,
}

fn prey_predator(a: PreyPredatorArgs) -> Result<()> {
    let pair = load_prey_predator(&a.data)?;
    let neuron = NeurochaosConfig::new(a.q, a.b, a.epsilon)?;
    let raw = CccConfig::new(40, 15, 4, 8);
    let firing = CccConfig::new(40, 15, 4, 4);
    let r = prey_predator_ccc(&pair, &raw, &neuron, &firing)?;
    let rows = [
        ("raw", "predator->prey", r.raw_predator_to_prey),
        ("raw", "prey->predator", r.raw_prey_to_predator),
        ("firing_time", "predator->prey", r.firing_predator_to_prey),
        ("firing_time", "prey->predator", r.firing_prey_to_predator),
    ]
    .map(|(series, direction, ccc)| PreyPredatorRow { series, direction, ccc });
    for row in &rows {
        println!("{:>11} {}: {:.4}", row.series, row.direction, row.ccc);
    }
    let manifest = Manifest::new("prey-predator")
        .parameter("data", a.data.display())
        .parameter("points", pair.len())
        .parameter("q", a.q)
        .parameter("b", a.b)
        .parameter("epsilon", a.epsilon)
        .parameter("raw_ccc", format!("{raw:?}"))
        .parameter("firing_ccc", format!("{firing:?}"));
    export_results(&rows, &a.out, &manifest)?;
    Ok(())
}
