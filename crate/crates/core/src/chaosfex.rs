//! ChaosFEX: chaotic firing of a GLS neuron and its four trace features.
//!
//! A GLS neuron is a skew-tent map iterated from the initial activity `q`.
//! For a stimulus `s` in [0, 1] the neuron fires until its trace enters the
//! open `epsilon`-ball around `s`. The trace before that instant yields the
//! firing time `N`, firing rate `R`, energy `E` and symbolic entropy `H`.

use serde::{Deserialize, Serialize};

use crate::dynamics::skew_tent;
use crate::error::{Error, Result};

/// Number of features per stimulus.
pub const FEATURES_PER_STIMULUS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeurochaosConfig {
    /// Initial neural activity.
    pub q: f64,
    /// Discrimination threshold, also the skew of the neuron's map.
    pub b: f64,
    /// Radius of the recognition neighbourhood.
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for NeurochaosConfig {
    fn default() -> Self {
        Self {
            q: 0.56,
            b: 0.499,
            epsilon: 0.171,
            max_iter: 10_000,
        }
    }
}

impl NeurochaosConfig {
    pub fn new(q: f64, b: f64, epsilon: f64) -> Result<Self> {
        let cfg = Self {
            q,
            b,
            epsilon,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_q(self, q: f64) -> Self {
        Self { q, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::config(format!("q must lie in (0, 1), got {}", self.q)));
        }
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(Error::config(format!("b must lie in (0, 1), got {}", self.b)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be >= 1"));
        }
        Ok(())
    }
}

/// Pre-recognition trace `y(0), ..., y(N-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralTrace {
    pub samples: Vec<f64>,
    pub recognized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicTrace {
    pub symbols: Vec<u8>,
    pub p0: f64,
    pub p1: f64,
}

impl SymbolicTrace {
    /// Symbol 1 for samples at or above `b`, 0 below.
    pub fn from_trace(trace: &NeuralTrace, b: f64) -> Self {
        let symbols: Vec<u8> = trace.samples.iter().map(|&y| u8::from(y >= b)).collect();
        let ones = symbols.iter().filter(|&&s| s == 1).count();
        let (p0, p1) = if symbols.is_empty() {
            (0.0, 0.0)
        } else {
            let p1 = ones as f64 / symbols.len() as f64;
            (1.0 - p1, p1)
        };
        Self { symbols, p0, p1 }
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        if self.symbols.is_empty() {
            0.0
        } else {
            binary_entropy(self.p1)
        }
    }
}

fn binary_entropy(p1: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(p1) + term(1.0 - p1)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub firing_time: usize,
    pub firing_rate: f64,
    pub energy: f64,
    pub entropy: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURES_PER_STIMULUS] {
        [
            self.firing_time as f64,
            self.firing_rate,
            self.energy,
            self.entropy,
        ]
    }
}

/// Per-stimulus features of one instance, in stimulus order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureVector>,
    /// Stimulus indices whose trace hit `max_iter` without recognition.
    pub unrecognized: Vec<usize>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stimulus-major flattening `N1, R1, E1, H1, N2, ...`.
    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flat_map(FeatureVector::to_array).collect()
    }

    pub fn firing_times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.firing_time as f64).collect()
    }

    pub fn all_recognized(&self) -> bool {
        self.unrecognized.is_empty()
    }
}

/// Affine map of `raw` onto [0, 1] using the range `[lo, hi]`, clamped.
pub fn normalize_series(raw: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::DegenerateRange { lo, hi });
    }
    let span = hi - lo;
    Ok(raw
        .iter()
        .map(|&x| ((x - lo) / span).clamp(0.0, 1.0))
        .collect())
}

/// How raw instances are mapped into the unit interval before firing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Normalization {
    /// One fixed range, taken from the training data.
    Range { lo: f64, hi: f64 },
    /// Each instance is min-max scaled by its own extremes.
    PerInstance,
}

impl Normalization {
    /// Global `[min, max]` over every value of every instance.
    pub fn fit_range<'a, I>(instances: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let (lo, hi) = min_max(instances.into_iter().flatten().copied())
            .ok_or(Error::Empty("normalization range of no data"))?;
        if !(hi > lo) {
            return Err(Error::DegenerateRange { lo, hi });
        }
        Ok(Normalization::Range { lo, hi })
    }

    pub fn apply(&self, raw: &[f64]) -> Result<Vec<f64>> {
        match *self {
            Normalization::Range { lo, hi } => normalize_series(raw, lo, hi),
            Normalization::PerInstance => {
                let (lo, hi) =
                    min_max(raw.iter().copied()).ok_or(Error::Empty("instance to normalize"))?;
                normalize_series(raw, lo, hi)
            }
        }
    }
}

pub(crate) fn min_max(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

fn check_stimulus(stimulus: f64) -> Result<()> {
    if (0.0..=1.0).contains(&stimulus) {
        Ok(())
    } else {
        Err(Error::Domain {
            value: stimulus,
            domain: "[0, 1]",
        })
    }
}

/// Iterate the neuron from `q` until `|y(t) - stimulus| < epsilon`.
pub fn fire_trace(stimulus: f64, config: &NeurochaosConfig) -> Result<NeuralTrace> {
    check_stimulus(stimulus)?;
    let mut samples = Vec::new();
    let mut y = config.q;
    for t in 0..=config.max_iter {
        if (y - stimulus).abs() < config.epsilon {
            return Ok(NeuralTrace {
                samples,
                recognized: true,
            });
        }
        if t == config.max_iter {
            break;
        }
        samples.push(y);
        y = skew_tent(y, config.b);
    }
    Ok(NeuralTrace {
        samples,
        recognized: false,
    })
}

pub fn extract_features(trace: &NeuralTrace, config: &NeurochaosConfig) -> FeatureVector {
    let n = trace.samples.len();
    if n == 0 {
        return FeatureVector::default();
    }
    let symbolic = SymbolicTrace::from_trace(trace, config.b);
    FeatureVector {
        firing_time: n,
        firing_rate: symbolic.p1,
        energy: trace.samples.iter().map(|y| y * y).sum(),
        entropy: symbolic.entropy(),
    }
}

/// Fused `fire_trace` + `extract_features` without materializing the trace.
/// Returns the features and whether the stimulus was recognized.
#[inline]
pub(crate) fn stimulus_features(stimulus: f64, config: &NeurochaosConfig) -> (FeatureVector, bool) {
    let mut y = config.q;
    let mut above = 0usize;
    let mut energy = 0.0;
    let mut n = 0usize;
    let mut recognized = false;
    for t in 0..=config.max_iter {
        if (y - stimulus).abs() < config.epsilon {
            recognized = true;
            break;
        }
        if t == config.max_iter {
            break;
        }
        n += 1;
        above += usize::from(y >= config.b);
        energy += y * y;
        y = skew_tent(y, config.b);
    }
    if n == 0 {
        return (FeatureVector::default(), recognized);
    }
    let rate = above as f64 / n as f64;
    let fv = FeatureVector {
        firing_time: n,
        firing_rate: rate,
        energy,
        entropy: binary_entropy(rate),
    };
    (fv, recognized)
}

/// Features of every stimulus of an already normalized instance.
pub fn transform_instance(instance: &[f64], config: &NeurochaosConfig) -> Result<FeatureMatrix> {
    let mut out = FeatureMatrix {
        rows: Vec::with_capacity(instance.len()),
        unrecognized: Vec::new(),
    };
    for (i, &s) in instance.iter().enumerate() {
        check_stimulus(s)?;
        let (fv, recognized) = stimulus_features(s, config);
        if !recognized {
            out.unrecognized.push(i);
        }
        out.rows.push(fv);
    }
    if !out.unrecognized.is_empty() {
        log::warn!(
            "{} of {} stimuli not recognized within {} iterations",
            out.unrecognized.len(),
            instance.len(),
            config.max_iter
        );
    }
    Ok(out)
}

/// Writes the flattened features of `instance` into `out` (length `4 n`) and
/// returns the number of unrecognized stimuli.
pub(crate) fn transform_into(
    instance: &[f64],
    config: &NeurochaosConfig,
    out: &mut [f64],
) -> Result<usize> {
    debug_assert_eq!(out.len(), instance.len() * FEATURES_PER_STIMULUS);
    let mut missed = 0;
    for (&s, row) in instance.iter().zip(out.chunks_exact_mut(FEATURES_PER_STIMULUS)) {
        check_stimulus(s)?;
        let (fv, recognized) = stimulus_features(s, config);
        missed += usize::from(!recognized);
        row.copy_from_slice(&fv.to_array());
    }
    Ok(missed)
}

/// Firing-time series of an already normalized instance.
pub fn firing_times(instance: &[f64], config: &NeurochaosConfig) -> Result<Vec<f64>> {
    Ok(transform_instance(instance, config)?.firing_times())
}
