//! ChaosNet: nearest-prototype classification of ChaosFEX features by
//! cosine similarity.
//!
//! Each class is summarized by the elementwise mean of its training
//! instances' flattened feature matrices (length `4 n`). A test instance is
//! assigned to the class whose prototype has the largest cosine similarity
//! with its own flattened features; ties go to the smallest class index.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaosfex::{self, NeurochaosConfig, Normalization, FEATURES_PER_STIMULUS};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

const CHUNK: usize = 32;

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// How the normalization of a model is derived from its training data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Global min/max over the training instances.
    TrainingRange,
    #[default]
    PerInstance,
}

impl NormalizationMode {
    pub fn fit(&self, train: &Dataset) -> Result<Normalization> {
        match self {
            NormalizationMode::TrainingRange => {
                Normalization::fit_range(train.instances.iter().map(Vec::as_slice))
            }
            NormalizationMode::PerInstance => Ok(Normalization::PerInstance),
        }
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "training_range" | "training-range" | "range" => Ok(Self::TrainingRange),
            "per_instance" | "per-instance" => Ok(Self::PerInstance),
            other => Err(Error::Unknown {
                kind: "normalization mode",
                value: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassPrototype {
    pub label: usize,
    pub mean_vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosNetModel {
    pub prototypes: Vec<ClassPrototype>,
    pub config: NeurochaosConfig,
    pub normalization: Normalization,
}

/// Normalized, flattened ChaosFEX features of one raw instance.
pub fn instance_features(
    raw: &[f64],
    normalization: &Normalization,
    config: &NeurochaosConfig,
) -> Result<Vec<f64>> {
    let x = normalization.apply(raw)?;
    let mut out = vec![0.0; x.len() * FEATURES_PER_STIMULUS];
    let missed = chaosfex::transform_into(&x, config, &mut out)?;
    if missed > 0 {
        log::warn!("{missed} stimuli not recognized within {} iterations", config.max_iter);
    }
    Ok(out)
}

/// Features of all instances, in order.
pub fn dataset_features(
    data: &Dataset,
    normalization: &Normalization,
    config: &NeurochaosConfig,
) -> Result<Vec<Vec<f64>>> {
    data.instances
        .par_iter()
        .map(|raw| instance_features(raw, normalization, config))
        .collect()
}

/// Per-class elementwise means of precomputed feature vectors. Summation runs
/// in fixed-size chunks reduced in order, so the result does not depend on
/// thread scheduling.
fn class_means(features: &[Vec<f64>], labels: &[usize]) -> Result<Vec<ClassPrototype>> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    if classes < 2 {
        return Err(Error::config("ChaosNet needs at least two classes"));
    }
    let dim = features[0].len();
    let partials: Vec<(Vec<Vec<f64>>, Vec<usize>)> = features
        .par_chunks(CHUNK)
        .zip(labels.par_chunks(CHUNK))
        .map(|(fs, ls)| {
            let mut sums = vec![vec![0.0; dim]; classes];
            let mut counts = vec![0; classes];
            for (f, &l) in fs.iter().zip(ls) {
                counts[l] += 1;
                for (s, v) in sums[l].iter_mut().zip(f) {
                    *s += v;
                }
            }
            (sums, counts)
        })
        .collect();
    let mut sums = vec![vec![0.0; dim]; classes];
    let mut counts = vec![0usize; classes];
    for (ps, pc) in partials {
        for k in 0..classes {
            counts[k] += pc[k];
            for (s, v) in sums[k].iter_mut().zip(&ps[k]) {
                *s += v;
            }
        }
    }
    sums.into_iter()
        .zip(counts)
        .enumerate()
        .map(|(label, (sum, count))| {
            if count == 0 {
                return Err(Error::EmptyClass(label));
            }
            let m = count as f64;
            Ok(ClassPrototype {
                label,
                mean_vector: sum.into_iter().map(|s| s / m).collect(),
            })
        })
        .collect()
}

pub fn fit(train: &Dataset, config: NeurochaosConfig, mode: NormalizationMode) -> Result<ChaosNetModel> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let normalization = mode.fit(train)?;
    let features = dataset_features(train, &normalization, &config)?;
    let prototypes = class_means(&features, &train.labels)?;
    Ok(ChaosNetModel {
        prototypes,
        config,
        normalization,
    })
}

/// Index of the largest similarity; the first wins ties.
fn argmax_first(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, s) in scores.enumerate() {
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    best
}

impl ChaosNetModel {
    pub fn dim(&self) -> usize {
        self.prototypes[0].mean_vector.len()
    }

    pub fn instance_len(&self) -> usize {
        self.dim() / FEATURES_PER_STIMULUS
    }

    pub fn similarities(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.prototypes
            .iter()
            .map(|p| cosine_similarity(features, &p.mean_vector))
            .collect()
    }

    /// Label for an already extracted feature vector.
    pub fn predict_features(&self, features: &[f64]) -> Result<usize> {
        let sims = self.similarities(features)?;
        Ok(self.prototypes[argmax_first(sims.into_iter())].label)
    }

    pub fn predict(&self, instance: &[f64]) -> Result<usize> {
        if instance.len() != self.instance_len() {
            return Err(Error::LengthMismatch {
                expected: self.instance_len(),
                actual: instance.len(),
            });
        }
        let f = instance_features(instance, &self.normalization, &self.config)?;
        self.predict_features(&f)
    }

    pub fn predict_all(&self, data: &Dataset) -> Result<Vec<usize>> {
        data.instances.par_iter().map(|x| self.predict(x)).collect()
    }

    pub fn evaluate(&self, test: &Dataset) -> Result<EvaluationReport> {
        if test.is_empty() {
            return Err(Error::Empty("test set"));
        }
        let pred = self.predict_all(test)?;
        Ok(EvaluationReport::from_predictions(
            &test.labels,
            &pred,
            self.prototypes.len(),
        ))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str("# chaosnet model v1\n");
        let c = &self.config;
        let _ = writeln!(out, "q={}\nb={}\nepsilon={}\nmax_iter={}", c.q, c.b, c.epsilon, c.max_iter);
        match self.normalization {
            Normalization::Range { lo, hi } => {
                let _ = writeln!(out, "normalization=range:{lo}:{hi}");
            }
            Normalization::PerInstance => out.push_str("normalization=per_instance\n"),
        }
        let _ = writeln!(out, "classes={}\ndim={}", self.prototypes.len(), self.dim());
        for p in &self.prototypes {
            let _ = write!(out, "{}", p.label);
            for v in &p.mean_vector {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bad = |reason: String| Error::Format {
            what: format!("model file {}", path.display()),
            reason,
        };
        let mut header = std::collections::HashMap::new();
        let mut prototypes = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            if let Some((k, v)) = line.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
                continue;
            }
            let mut fields = line.split(',');
            let label = fields
                .next()
                .and_then(|l| l.parse::<usize>().ok())
                .ok_or_else(|| bad(format!("bad prototype line `{line:.40}`")))?;
            let mean_vector = fields
                .map(|f| f.parse::<f64>().map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            prototypes.push(ClassPrototype { label, mean_vector });
        }
        let get = |k: &str| header.get(k).ok_or_else(|| bad(format!("missing key `{k}`")));
        let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("bad `{k}`"))) };
        let config = NeurochaosConfig {
            q: num("q")?,
            b: num("b")?,
            epsilon: num("epsilon")?,
            max_iter: num("max_iter")? as usize,
        };
        config.validate()?;
        let normalization = match get("normalization")?.as_str() {
            "per_instance" => Normalization::PerInstance,
            other => {
                let parts: Vec<&str> = other.split(':').collect();
                match parts.as_slice() {
                    ["range", lo, hi] => Normalization::Range {
                        lo: lo.parse().map_err(|_| bad("bad range".into()))?,
                        hi: hi.parse().map_err(|_| bad("bad range".into()))?,
                    },
                    _ => return Err(bad(format!("unknown normalization `{other}`"))),
                }
            }
        };
        if prototypes.len() < 2 {
            return Err(bad("fewer than two prototypes".into()));
        }
        let dim = prototypes[0].mean_vector.len();
        if prototypes.iter().any(|p| p.mean_vector.len() != dim) {
            return Err(bad("prototype dimensions differ".into()));
        }
        Ok(Self {
            prototypes,
            config,
            normalization,
        })
    }
}

/// Per-class precision, recall and F1 plus the confusion matrix
/// (`confusion[truth][prediction]`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub macro_f1: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub confusion: Vec<Vec<usize>>,
}

impl EvaluationReport {
    pub fn from_predictions(truth: &[usize], predicted: &[usize], classes: usize) -> Self {
        let classes = truth
            .iter()
            .chain(predicted)
            .map(|&c| c + 1)
            .max()
            .unwrap_or(0)
            .max(classes);
        let mut confusion = vec![vec![0usize; classes]; classes];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t][p] += 1;
        }
        let mut precision = Vec::with_capacity(classes);
        let mut recall = Vec::with_capacity(classes);
        let mut f1 = Vec::with_capacity(classes);
        for k in 0..classes {
            let tp = confusion[k][k] as f64;
            let predicted_k: usize = (0..classes).map(|t| confusion[t][k]).sum();
            let actual_k: usize = confusion[k].iter().sum();
            let p = if predicted_k == 0 { 0.0 } else { tp / predicted_k as f64 };
            let r = if actual_k == 0 { 0.0 } else { tp / actual_k as f64 };
            let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
            precision.push(p);
            recall.push(r);
            f1.push(f);
        }
        let macro_f1 = if classes == 0 {
            0.0
        } else {
            f1.iter().sum::<f64>() / classes as f64
        };
        Self {
            macro_f1,
            precision,
            recall,
            f1,
            confusion,
        }
    }

    pub fn accuracy(&self) -> f64 {
        let total: usize = self.confusion.iter().flatten().sum();
        let correct: usize = (0..self.confusion.len()).map(|k| self.confusion[k][k]).sum();
        if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        }
    }
}

/// Stratified folds: each class is shuffled with `seed` and cut into `k`
/// contiguous chunks; fold `i` is the union of every class's chunk `i`.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for class in 0..classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(Error::FoldConstruction {
                folds: k,
                class,
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        let n = idx.len();
        for (f, fold) in folds.iter_mut().enumerate() {
            fold.extend_from_slice(&idx[f * n / k..(f + 1) * n / k]);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvRow {
    pub q: f64,
    pub mean_macro_f1: f64,
    pub fold_macro_f1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub table: Vec<CvRow>,
    pub best_score: f64,
    /// Every `q` reaching `best_score`, ascending.
    pub maximizers: Vec<f64>,
    /// Smallest maximizer.
    pub best_q: f64,
}

pub const CV_FOLDS: usize = 5;

/// `q` grid 0.01, 0.02, ..., 0.98.
pub fn default_q_grid() -> Vec<f64> {
    (1..=98).map(|i| i as f64 / 100.0).collect()
}

/// Five-fold cross-validated macro F1 for each `q` in `grid`.
pub fn tune_q(
    train: &Dataset,
    base: NeurochaosConfig,
    grid: &[f64],
    mode: NormalizationMode,
    seed: u64,
) -> Result<TuneResult> {
    if grid.is_empty() {
        return Err(Error::Empty("q grid"));
    }
    let folds = stratified_folds(&train.labels, CV_FOLDS, seed)?;
    let mut in_fold = vec![0usize; train.len()];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            in_fold[i] = f;
        }
    }
    let fold_norms: Vec<Normalization> = (0..CV_FOLDS)
        .map(|f| {
            let idx: Vec<usize> = (0..train.len()).filter(|&i| in_fold[i] != f).collect();
            mode.fit(&train.subset(&idx))
        })
        .collect::<Result<_>>()?;
    let shared_norm = fold_norms.windows(2).all(|w| w[0] == w[1]);

    let mut table = Vec::with_capacity(grid.len());
    for &q in grid {
        let config = base.with_q(q);
        config.validate()?;
        let shared = if shared_norm {
            Some(dataset_features(train, &fold_norms[0], &config)?)
        } else {
            None
        };
        let mut fold_macro_f1 = Vec::with_capacity(CV_FOLDS);
        for (f, norm) in fold_norms.iter().enumerate() {
            let owned;
            let features = match &shared {
                Some(s) => s,
                None => {
                    owned = dataset_features(train, norm, &config)?;
                    &owned
                }
            };
            let (tr, va): (Vec<usize>, Vec<usize>) =
                (0..train.len()).partition(|&i| in_fold[i] != f);
            let tr_feats: Vec<Vec<f64>> = tr.iter().map(|&i| features[i].clone()).collect();
            let tr_labels: Vec<usize> = tr.iter().map(|&i| train.labels[i]).collect();
            let model = ChaosNetModel {
                prototypes: class_means(&tr_feats, &tr_labels)?,
                config,
                normalization: *norm,
            };
            let pred: Vec<usize> = va
                .iter()
                .map(|&i| model.predict_features(&features[i]))
                .collect::<Result<_>>()?;
            let truth: Vec<usize> = va.iter().map(|&i| train.labels[i]).collect();
            fold_macro_f1.push(
                EvaluationReport::from_predictions(&truth, &pred, model.prototypes.len()).macro_f1,
            );
        }
        let mean = fold_macro_f1.iter().sum::<f64>() / CV_FOLDS as f64;
        log::debug!("q = {q:.2}: mean macro F1 = {mean:.4}");
        table.push(CvRow {
            q,
            mean_macro_f1: mean,
            fold_macro_f1,
        });
    }
    let best_score = table
        .iter()
        .map(|r| r.mean_macro_f1)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut maximizers: Vec<f64> = table
        .iter()
        .filter(|r| r.mean_macro_f1 == best_score)
        .map(|r| r.q)
        .collect();
    maximizers.sort_by(f64::total_cmp);
    Ok(TuneResult {
        best_q: maximizers[0],
        table,
        best_score,
        maximizers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cosine_examples() {
        let u = [0.3, -1.2, 4.0];
        assert_abs_diff_eq!(cosine_similarity(&u, &u).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(cosine_similarity(&[1.0], &[1.0, 2.0]).is_err());
    }

    fn toy_model(p0: Vec<f64>, p1: Vec<f64>) -> ChaosNetModel {
        ChaosNetModel {
            prototypes: vec![
                ClassPrototype { label: 0, mean_vector: p0 },
                ClassPrototype { label: 1, mean_vector: p1 },
            ],
            config: NeurochaosConfig::default(),
            normalization: Normalization::PerInstance,
        }
    }

    #[test]
    fn prediction_rules() {
        let m = toy_model(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.predict_features(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0);
        // equal similarity to both prototypes
        assert_eq!(m.predict_features(&[1.0, 1.0, 0.0, 0.0]).unwrap(), 0);
        assert_eq!(m.predict_features(&[0.0, 7.5, 0.0, 0.0]).unwrap(), 1);
        assert!(m.predict_features(&[1.0]).is_err());
        assert!(m.predict(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn single_instance_prototypes() {
        let train = Dataset::new(vec![vec![0.1, 0.9, 0.4], vec![0.8, 0.3, 0.2]], vec![0, 1]).unwrap();
        let cfg = NeurochaosConfig::default();
        let norm = Normalization::Range { lo: 0.0, hi: 1.0 };
        let model = ChaosNetModel {
            prototypes: class_means(&dataset_features(&train, &norm, &cfg).unwrap(), &train.labels).unwrap(),
            config: cfg,
            normalization: norm,
        };
        for (x, l) in train.iter() {
            let expected = chaosfex::transform_instance(x, &cfg).unwrap().flatten();
            assert_eq!(model.prototypes[l].mean_vector, expected);
        }
    }

    #[test]
    fn empty_class_rejected() {
        let train = Dataset::new(vec![vec![0.1, 0.9], vec![0.8, 0.3]], vec![0, 2]).unwrap();
        let err = fit(&train, NeurochaosConfig::default(), NormalizationMode::PerInstance);
        assert!(matches!(err, Err(Error::EmptyClass(1))));
        let one_class = Dataset::new(vec![vec![0.1, 0.9]], vec![0]).unwrap();
        assert!(fit(&one_class, NeurochaosConfig::default(), NormalizationMode::PerInstance).is_err());
    }

    #[test]
    fn macro_f1_examples() {
        let truth = [0, 0, 1, 1];
        let r = EvaluationReport::from_predictions(&truth, &truth, 2);
        assert_eq!(r.macro_f1, 1.0);
        let r = EvaluationReport::from_predictions(&truth, &[0, 0, 0, 0], 2);
        assert_abs_diff_eq!(r.macro_f1, 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(r.f1[1], 0.0);
        assert_eq!(r.confusion, vec![vec![2, 0], vec![2, 0]]);
        assert_eq!(r.accuracy(), 0.5);
    }

    #[test]
    fn folds_are_stratified_partitions() {
        let labels: Vec<usize> = (0..53).map(|i| usize::from(i % 3 == 0)).collect();
        let folds = stratified_folds(&labels, 5, 9).unwrap();
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..53).collect::<Vec<_>>());
        for fold in &folds {
            let ones = fold.iter().filter(|&&i| labels[i] == 1).count();
            assert!((3..=4).contains(&ones));
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 9).unwrap());
        assert!(matches!(
            stratified_folds(&[0, 0, 0, 0, 0, 1, 1], 5, 0),
            Err(Error::FoldConstruction { class: 1, .. })
        ));
    }

    #[test]
    fn model_file_roundtrip() {
        let m = ChaosNetModel {
            normalization: Normalization::Range { lo: -0.25, hi: 1.0 / 3.0 },
            ..toy_model(vec![0.1, 2.0 / 7.0, 3.0, 0.0], vec![1e-300, 5.5, 0.25, 1.0])
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        m.save(&path).unwrap();
        assert_eq!(ChaosNetModel::load(&path).unwrap(), m);
        std::fs::write(&path, "q=0.5\n").unwrap();
        assert!(ChaosNetModel::load(&path).is_err());
    }

    #[test]
    fn tune_single_point_grid() {
        let mut instances = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            instances.push((0..8).map(|j| (0.1 + 0.05 * ((j as f64) + t).sin()).abs()).collect());
            labels.push(0);
            instances.push((0..8).map(|j| 0.5 + 0.4 * ((j as f64) * 1.7 + t).cos()).collect());
            labels.push(1);
        }
        let data = Dataset::new(instances, labels).unwrap();
        let base = NeurochaosConfig::default();
        let r = tune_q(&data, base, &[0.3], NormalizationMode::TrainingRange, 1).unwrap();
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.best_q, 0.3);
        assert_eq!(r.maximizers, vec![0.3]);
        assert_eq!(r.best_score, r.table[0].mean_macro_f1);
        assert!(tune_q(&data, base, &[], NormalizationMode::PerInstance, 1).is_err());
    }
}
