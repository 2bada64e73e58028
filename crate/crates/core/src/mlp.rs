//! Dense feed-forward classifier trained by backpropagation with Adam.
//!
//! The default architecture is `2000 -> 5000 (sigmoid) -> 500 (relu) ->
//! 100 (relu) -> 30 (relu) -> 2 (softmax)` with a cross-entropy loss. The
//! network is generic over `f32` and `f64`; paper-scale training runs in
//! `f32`, gradient checks in `f64`.

use std::fmt::{Debug, Display};
use std::io::{Read, Write};
use std::path::Path;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis, LinalgScalar, ScalarOperand, Zip};
use num_traits::{Float, FromPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaosfex::Normalization;
use crate::chaosnet::EvaluationReport;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub trait Scalar:
    LinalgScalar + Float + FromPrimitive + ScalarOperand + Send + Sync + Debug + Display + 'static
{
    const BYTES: u8;
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f32 {
    const BYTES: u8 = 4;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }
}

impl Scalar for f64 {
    const BYTES: u8 = 8;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

fn cast<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("representable constant")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Relu,
    Softmax,
}

impl Activation {
    fn code(self) -> u8 {
        match self {
            Activation::Sigmoid => 0,
            Activation::Relu => 1,
            Activation::Softmax => 2,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Sigmoid),
            1 => Some(Activation::Relu),
            2 => Some(Activation::Softmax),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    /// Input size followed by each layer's width.
    pub sizes: Vec<usize>,
    /// One per layer; only the last may be softmax, and it must be.
    pub activations: Vec<Activation>,
}

impl MlpArchitecture {
    pub fn new(sizes: Vec<usize>, activations: Vec<Activation>) -> Result<Self> {
        let arch = Self { sizes, activations };
        arch.validate()?;
        Ok(arch)
    }

    /// `input -> 5000 sigmoid -> 500 relu -> 100 relu -> 30 relu -> classes softmax`.
    pub fn five_layer(input: usize, classes: usize) -> Self {
        use Activation::*;
        Self {
            sizes: vec![input, 5000, 500, 100, 30, classes],
            activations: vec![Sigmoid, Relu, Relu, Relu, Softmax],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.len() < 2 || self.activations.len() != self.sizes.len() - 1 {
            return Err(Error::config("architecture needs one activation per layer"));
        }
        if self.sizes.contains(&0) {
            return Err(Error::config("layer sizes must be positive"));
        }
        let last = self.activations.len() - 1;
        if self.activations[last] != Activation::Softmax
            || self.activations[..last].contains(&Activation::Softmax)
        {
            return Err(Error::config("softmax must be the output activation and only there"));
        }
        if self.classes() < 2 {
            return Err(Error::config("output layer needs at least two classes"));
        }
        Ok(())
    }

    pub fn input(&self) -> usize {
        self.sizes[0]
    }

    pub fn classes(&self) -> usize {
        *self.sizes.last().expect("validated")
    }

    pub fn hidden_layers(&self) -> usize {
        self.activations.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense<F> {
    /// `inputs x outputs`.
    pub weights: Array2<F>,
    pub bias: Array1<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<F> {
    pub architecture: MlpArchitecture,
    pub layers: Vec<Dense<F>>,
    /// Applied to raw instances in `train`, `predict` and `evaluate`.
    pub normalization: Option<Normalization>,
}

/// Output probabilities and every layer's activations for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward<F> {
    pub probabilities: Vec<F>,
    pub activations: Vec<Vec<F>>,
}

/// Gradients of one layer, same shapes as [`Dense`].
pub type LayerGrads<F> = Dense<F>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 32,
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-7,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::config("epochs and batch size must be >= 1"));
        }
        if !(self.learning_rate >= 0.0) {
            return Err(Error::config("learning rate must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    /// Mean cross-entropy per epoch.
    pub loss_curve: Vec<f64>,
}

fn sigmoid<F: Scalar>(z: F) -> F {
    F::one() / (F::one() + (-z).exp())
}

fn softmax_rows<F: Scalar>(z: &mut Array2<F>) {
    for mut row in z.rows_mut() {
        let max = row.iter().copied().fold(F::neg_infinity(), F::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

impl<F: Scalar> MlpModel<F> {
    /// Glorot-uniform weights, zero biases.
    pub fn new(architecture: MlpArchitecture, seed: u64) -> Result<Self> {
        architecture.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = architecture
            .sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let weights =
                    Array2::from_shape_simple_fn((fan_in, fan_out), || cast(rng.random_range(-limit..limit)));
                Dense {
                    weights,
                    bias: Array1::zeros(fan_out),
                }
            })
            .collect();
        Ok(Self {
            architecture,
            layers,
            normalization: None,
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = Some(normalization);
        self
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.architecture.input() {
            return Err(Error::LengthMismatch {
                expected: self.architecture.input(),
                actual: width,
            });
        }
        Ok(())
    }

    /// Activations of every layer for a batch (rows are instances); the
    /// last entry holds the class probabilities.
    pub fn forward_batch(&self, x: ArrayView2<F>) -> Result<Vec<Array2<F>>> {
        self.check_width(x.ncols())?;
        let mut acts: Vec<Array2<F>> = Vec::with_capacity(self.layers.len());
        for (i, (layer, act)) in self.layers.iter().zip(&self.architecture.activations).enumerate() {
            let input = if i == 0 { x } else { acts[i - 1].view() };
            let mut z = input.dot(&layer.weights);
            for mut row in z.rows_mut() {
                row.zip_mut_with(&layer.bias, |v, &b| *v = *v + b);
            }
            match act {
                Activation::Sigmoid => z.mapv_inplace(sigmoid),
                Activation::Relu => z.mapv_inplace(|v| v.max(F::zero())),
                Activation::Softmax => softmax_rows(&mut z),
            }
            acts.push(z);
        }
        Ok(acts)
    }

    pub fn forward(&self, instance: &[F]) -> Result<Forward<F>> {
        let x = ArrayView2::from_shape((1, instance.len()), instance)
            .map_err(|e| Error::config(e.to_string()))?;
        let acts = self.forward_batch(x)?;
        let activations: Vec<Vec<F>> = acts.into_iter().map(|a| a.into_raw_vec_and_offset().0).collect();
        Ok(Forward {
            probabilities: activations.last().expect("at least one layer").clone(),
            activations,
        })
    }

    /// Mean cross-entropy and its gradients for a batch.
    pub fn backward(&self, x: ArrayView2<F>, labels: &[usize]) -> Result<(F, Vec<LayerGrads<F>>)> {
        let mut grads = self.zero_grads();
        let loss = self.backward_into(x, labels, &mut grads)?;
        Ok((loss, grads))
    }

    fn zero_grads(&self) -> Vec<LayerGrads<F>> {
        self.layers
            .iter()
            .map(|l| Dense {
                weights: Array2::zeros(l.weights.raw_dim()),
                bias: Array1::zeros(l.bias.raw_dim()),
            })
            .collect()
    }

    /// As [`backward`](Self::backward), overwriting preallocated gradients.
    fn backward_into(&self, x: ArrayView2<F>, labels: &[usize], grads: &mut [LayerGrads<F>]) -> Result<F> {
        if labels.len() != x.nrows() {
            return Err(Error::LengthMismatch {
                expected: x.nrows(),
                actual: labels.len(),
            });
        }
        let classes = self.architecture.classes();
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::Unknown {
                kind: "class label",
                value: bad.to_string(),
            });
        }
        let acts = self.forward_batch(x)?;
        let n = cast::<F>(labels.len() as f64);
        let probs = acts.last().expect("at least one layer");
        let tiny = F::min_positive_value();
        let loss = labels
            .iter()
            .enumerate()
            .map(|(r, &l)| -probs[[r, l]].max(tiny).ln())
            .fold(F::zero(), |a, b| a + b)
            / n;

        // softmax + cross-entropy: dL/dz = (p - y) / n
        let mut delta = probs.clone();
        for (r, &l) in labels.iter().enumerate() {
            delta[[r, l]] = delta[[r, l]] - F::one();
        }
        delta.mapv_inplace(|v| v / n);

        for i in (0..self.layers.len()).rev() {
            let input = if i == 0 { x } else { acts[i - 1].view() };
            general_mat_mul(F::one(), &input.t(), &delta, F::zero(), &mut grads[i].weights);
            grads[i].bias.assign(&delta.sum_axis(Axis(0)));
            if i == 0 {
                break;
            }
            let mut upstream = delta.dot(&self.layers[i].weights.t());
            let a = &acts[i - 1];
            match self.architecture.activations[i - 1] {
                Activation::Sigmoid => Zip::from(&mut upstream)
                    .and(a)
                    .for_each(|d, &av| *d = *d * av * (F::one() - av)),
                Activation::Relu => Zip::from(&mut upstream).and(a).for_each(|d, &av| {
                    if av <= F::zero() {
                        *d = F::zero()
                    }
                }),
                Activation::Softmax => unreachable!("softmax only on the output layer"),
            }
            delta = upstream;
        }
        Ok(loss)
    }

    /// Mean cross-entropy of a batch without gradients.
    pub fn loss(&self, x: ArrayView2<F>, labels: &[usize]) -> Result<F> {
        let acts = self.forward_batch(x)?;
        let probs = acts.last().expect("at least one layer");
        let tiny = F::min_positive_value();
        let total = labels
            .iter()
            .enumerate()
            .map(|(r, &l)| -probs[[r, l]].max(tiny).ln())
            .fold(F::zero(), |a, b| a + b);
        Ok(total / cast(labels.len() as f64))
    }

    /// Output of hidden layer `layer_index` (1-based) for an already
    /// prepared input.
    pub fn hidden_activations(&self, instance: &[F], layer_index: usize) -> Result<Vec<F>> {
        let hidden = self.architecture.hidden_layers();
        if layer_index == 0 || layer_index > hidden {
            return Err(Error::LayerIndex {
                index: layer_index,
                hidden,
            });
        }
        let mut f = self.forward(instance)?;
        Ok(f.activations.swap_remove(layer_index - 1))
    }

    /// Applies the model's normalization and converts to `F`.
    pub fn prepare(&self, raw: &[f64]) -> Result<Vec<F>> {
        let values = match &self.normalization {
            Some(n) => n.apply(raw)?,
            None => raw.to_vec(),
        };
        Ok(values.into_iter().map(cast).collect())
    }

    fn prepare_matrix(&self, instances: &[Vec<f64>]) -> Result<Array2<F>> {
        let width = self.architecture.input();
        let mut m = Array2::zeros((instances.len(), width));
        for (mut row, raw) in m.rows_mut().into_iter().zip(instances) {
            self.check_width(raw.len())?;
            row.assign(&Array1::from(self.prepare(raw)?));
        }
        Ok(m)
    }

    pub fn predict_proba(&self, raw: &[f64]) -> Result<Vec<F>> {
        self.check_width(raw.len())?;
        Ok(self.forward(&self.prepare(raw)?)?.probabilities)
    }

    pub fn predict(&self, raw: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(raw)?))
    }

    pub fn predict_all(&self, data: &Dataset) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(data.len());
        for chunk in data.instances.chunks(256) {
            let x = self.prepare_matrix(chunk)?;
            let acts = self.forward_batch(x.view())?;
            let probs = acts.last().expect("at least one layer");
            out.extend(probs.rows().into_iter().map(|r| argmax(r.as_slice().expect("contiguous"))));
        }
        Ok(out)
    }

    pub fn evaluate(&self, data: &Dataset) -> Result<EvaluationReport> {
        if data.is_empty() {
            return Err(Error::Empty("test set"));
        }
        let pred = self.predict_all(data)?;
        Ok(EvaluationReport::from_predictions(
            &data.labels,
            &pred,
            self.architecture.classes(),
        ))
    }

    /// Mini-batch Adam on the mean cross-entropy.
    pub fn train(&mut self, data: &Dataset, config: &TrainingConfig) -> Result<TrainingReport> {
        config.validate()?;
        if data.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let x = self.prepare_matrix(&data.instances)?;
        let mut optimizer = Adam::new(self, config);
        let mut grads = self.zero_grads();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut loss_curve = Vec::with_capacity(config.epochs);
        let mut batch = Array2::<F>::zeros((config.batch_size, x.ncols()));
        let mut labels = Vec::with_capacity(config.batch_size);
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for idx in order.chunks(config.batch_size) {
                labels.clear();
                for (r, &i) in idx.iter().enumerate() {
                    batch.row_mut(r).assign(&x.row(i));
                    labels.push(data.labels[i]);
                }
                let view = batch.slice(s![..idx.len(), ..]);
                let loss = self.backward_into(view, &labels, &mut grads)?;
                let loss = loss.to_f64().unwrap_or(f64::NAN);
                if !loss.is_finite() {
                    return Err(Error::Diverged { epoch, loss });
                }
                total += loss * idx.len() as f64;
                optimizer.step(self, &grads);
            }
            let mean = total / data.len() as f64;
            log::debug!("epoch {epoch}: loss {mean:.6}");
            loss_curve.push(mean);
        }
        Ok(TrainingReport { loss_curve })
    }
}

fn argmax<F: Scalar>(p: &[F]) -> usize {
    let mut best = 0;
    for (k, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = k;
        }
    }
    best
}

struct Adam<F> {
    m: Vec<Dense<F>>,
    v: Vec<Dense<F>>,
    t: i32,
    lr: F,
    beta1: F,
    beta2: F,
    eps: F,
}

impl<F: Scalar> Adam<F> {
    fn new(model: &MlpModel<F>, config: &TrainingConfig) -> Self {
        Self {
            m: model.zero_grads(),
            v: model.zero_grads(),
            t: 0,
            lr: cast(config.learning_rate),
            beta1: cast(config.beta1),
            beta2: cast(config.beta2),
            eps: cast(config.adam_epsilon),
        }
    }

    fn step(&mut self, model: &mut MlpModel<F>, grads: &[LayerGrads<F>]) {
        self.t += 1;
        let one = F::one();
        let (b1, b2) = (self.beta1, self.beta2);
        let step = self.lr * (one - b2.powi(self.t)).sqrt() / (one - b1.powi(self.t));
        let eps = self.eps;
        for (((layer, g), m), v) in model.layers.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            Zip::from(&mut layer.weights)
                .and(&g.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (one - b1) * g;
                    *v = b2 * *v + (one - b2) * g * g;
                    *w = *w - step * *m / (v.sqrt() + eps);
                });
            Zip::from(&mut layer.bias)
                .and(&g.bias)
                .and(&mut m.bias)
                .and(&mut v.bias)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (one - b1) * g;
                    *v = b2 * *v + (one - b2) * g * g;
                    *w = *w - step * *m / (v.sqrt() + eps);
                });
        }
    }
}

fn central_difference(
    probe: &mut MlpModel<f64>,
    x: ArrayView2<f64>,
    labels: &[usize],
    h: f64,
    param: impl Fn(&mut MlpModel<f64>) -> &mut f64,
) -> Result<f64> {
    let orig = *param(probe);
    *param(probe) = orig + h;
    let up = probe.loss(x, labels)?;
    *param(probe) = orig - h;
    let down = probe.loss(x, labels)?;
    *param(probe) = orig;
    Ok((up - down) / (2.0 * h))
}

fn relative_error(numerical: f64, analytical: f64) -> f64 {
    (numerical - analytical).abs() / (numerical.abs() + analytical.abs()).max(1e-8)
}

/// Largest relative error between backpropagated gradients and central
/// finite differences with step `h`, over every parameter.
pub fn gradient_check(model: &MlpModel<f64>, instance: &[f64], label: usize, h: f64) -> Result<f64> {
    gradient_check_with(model, instance, label, h, |m, x, l| Ok(m.backward(x, l)?.1))
}

/// As [`gradient_check`] with a caller-supplied gradient routine.
pub fn gradient_check_with<G>(
    model: &MlpModel<f64>,
    instance: &[f64],
    label: usize,
    h: f64,
    gradients: G,
) -> Result<f64>
where
    G: Fn(&MlpModel<f64>, ArrayView2<f64>, &[usize]) -> Result<Vec<LayerGrads<f64>>>,
{
    let x = ArrayView2::from_shape((1, instance.len()), instance).map_err(|e| Error::config(e.to_string()))?;
    let labels = [label];
    let analytic = gradients(model, x, &labels)?;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (li, g) in analytic.iter().enumerate() {
        for ((r, c), &a) in g.weights.indexed_iter() {
            let n = central_difference(&mut probe, x, &labels, h, |m| &mut m.layers[li].weights[[r, c]])?;
            worst = worst.max(relative_error(n, a));
        }
        for (j, &a) in g.bias.iter().enumerate() {
            let n = central_difference(&mut probe, x, &labels, h, |m| &mut m.layers[li].bias[j])?;
            worst = worst.max(relative_error(n, a));
        }
    }
    Ok(worst)
}

const MAGIC: &[u8; 8] = b"NCMLP\x00\x00\x01";

impl<F: Scalar> MlpModel<F> {
    /// Binary layout: magic, scalar width, layer count, sizes, activation
    /// codes, normalization, then each layer's weights (row-major) and bias,
    /// all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.parameter_count() * F::BYTES as usize);
        out.extend_from_slice(MAGIC);
        out.push(F::BYTES);
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for &s in &self.architecture.sizes {
            out.extend_from_slice(&(s as u64).to_le_bytes());
        }
        out.extend(self.architecture.activations.iter().map(|a| a.code()));
        let (tag, lo, hi) = match self.normalization {
            None => (0u8, 0.0, 0.0),
            Some(Normalization::PerInstance) => (1, 0.0, 0.0),
            Some(Normalization::Range { lo, hi }) => (2, lo, hi),
        };
        out.push(tag);
        out.extend_from_slice(&lo.to_le_bytes());
        out.extend_from_slice(&hi.to_le_bytes());
        for l in &self.layers {
            for &w in l.weights.iter() {
                w.write_le(&mut out);
            }
            for &b in l.bias.iter() {
                b.write_le(&mut out);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |reason: &str| Error::Format {
            what: "MLP model".into(),
            reason: reason.into(),
        };
        let mut cur = bytes;
        let mut take = |n: usize| -> Result<&[u8]> {
            if cur.len() < n {
                return Err(bad("truncated"));
            }
            let (head, tail) = cur.split_at(n);
            cur = tail;
            Ok(head)
        };
        if take(8)? != MAGIC {
            return Err(bad("bad magic"));
        }
        if take(1)?[0] != F::BYTES {
            return Err(bad("scalar width differs from requested type"));
        }
        let layers = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        if layers == 0 || layers > 1024 {
            return Err(bad("implausible layer count"));
        }
        let sizes = (0..=layers)
            .map(|_| Ok(u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize))
            .collect::<Result<Vec<_>>>()?;
        let activations = take(layers)?
            .iter()
            .map(|&c| Activation::from_code(c).ok_or_else(|| bad("unknown activation")))
            .collect::<Result<Vec<_>>>()?;
        let architecture = MlpArchitecture::new(sizes, activations)?;
        let tag = take(1)?[0];
        let lo = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let hi = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let normalization = match tag {
            0 => None,
            1 => Some(Normalization::PerInstance),
            2 => Some(Normalization::Range { lo, hi }),
            _ => return Err(bad("unknown normalization")),
        };
        let width = F::BYTES as usize;
        let mut read = |n: usize| -> Result<Vec<F>> { Ok(take(n * width)?.chunks_exact(width).map(F::read_le).collect()) };
        let mut dense = Vec::with_capacity(layers);
        for w in architecture.sizes.windows(2) {
            let weights = Array2::from_shape_vec((w[0], w[1]), read(w[0] * w[1])?)
                .map_err(|e| bad(&e.to_string()))?;
            let bias = Array1::from(read(w[1])?);
            dense.push(Dense { weights, bias });
        }
        if !cur.is_empty() {
            return Err(bad("trailing bytes"));
        }
        Ok(Self {
            architecture,
            layers: dense,
            normalization,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
