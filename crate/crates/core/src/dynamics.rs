//! Chaotic maps and the coupled master-slave generators that produce the
//! cause (master) and effect (slave) series.
//!
//! Both coupled-map generators follow
//!
//! ```text
//! M(n) = T1(M(n-1))
//! S(n) = (1 - eta) * T2(S(n-1)) + eta * M(n-1)
//! ```
//!
//! and the coupled AR generator follows
//!
//! ```text
//! M(t) = a1 * M(t-1) + gamma * r1(t)
//! S(t) = a2 * S(t-1) + eta * M(t-1) + gamma * r2(t)
//! ```
//!
//! with independent standard-normal innovations `r1`, `r2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LENGTH: usize = 2000;
pub const DEFAULT_TRANSIENT: usize = 500;

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain {
            value: x,
            domain: "[0, 1]",
        })
    }
}

/// Skew-tent map with skewness `b` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewTent {
    b: f64,
}

impl SkewTent {
    pub fn new(b: f64) -> Result<Self> {
        if b > 0.0 && b < 1.0 {
            Ok(Self { b })
        } else {
            Err(Error::config(format!("skew-tent b must lie in (0, 1), got {b}")))
        }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// One iteration. `x == b` takes the decreasing branch.
    pub fn step(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.apply(x))
    }

    #[inline]
    pub(crate) fn apply(&self, x: f64) -> f64 {
        skew_tent(x, self.b)
    }
}

#[inline]
pub(crate) fn skew_tent(x: f64, b: f64) -> f64 {
    if x < b {
        x / b
    } else {
        (1.0 - x) / (1.0 - b)
    }
}

/// Logistic map `A x (1 - x)` with growth parameter in (0, 4].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    a: f64,
}

impl Logistic {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a <= 4.0 {
            Ok(Self { a })
        } else {
            Err(Error::config(format!("logistic A must lie in (0, 4], got {a}")))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn step(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.apply(x))
    }

    #[inline]
    pub(crate) fn apply(&self, x: f64) -> f64 {
        // rounding can overshoot 1 by an ulp near x = 0.5 when A = 4
        (self.a * x * (1.0 - x)).min(1.0)
    }
}

/// A 1D map on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChaoticMap {
    SkewTent { b: f64 },
    Logistic { a: f64 },
}

impl ChaoticMap {
    pub fn skew_tent(b: f64) -> Result<Self> {
        SkewTent::new(b).map(|m| ChaoticMap::SkewTent { b: m.b })
    }

    pub fn logistic(a: f64) -> Result<Self> {
        Logistic::new(a).map(|m| ChaoticMap::Logistic { a: m.a })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChaoticMap::SkewTent { b } => SkewTent::new(b).map(drop),
            ChaoticMap::Logistic { a } => Logistic::new(a).map(drop),
        }
    }

    pub fn step(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.apply(x))
    }

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        match *self {
            ChaoticMap::SkewTent { b } => skew_tent(x, b),
            ChaoticMap::Logistic { a } => Logistic { a }.apply(x),
        }
    }
}

/// Which generator produced a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum SystemTag {
    CoupledMaps {
        master: ChaoticMap,
        slave: ChaoticMap,
        eta: f64,
        seed: u64,
    },
    CoupledAr {
        a1: f64,
        a2: f64,
        gamma: f64,
        eta: f64,
        seed: u64,
    },
    /// Series loaded from disk.
    External,
}

/// One (master, slave) trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPair {
    pub master: Vec<f64>,
    pub slave: Vec<f64>,
    pub tag: SystemTag,
}

impl TimeSeriesPair {
    pub fn new(master: Vec<f64>, slave: Vec<f64>, tag: SystemTag) -> Result<Self> {
        if master.len() != slave.len() {
            return Err(Error::LengthMismatch {
                expected: master.len(),
                actual: slave.len(),
            });
        }
        Ok(Self { master, slave, tag })
    }

    pub fn len(&self) -> usize {
        self.master.len()
    }

    pub fn is_empty(&self) -> bool {
        self.master.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledMapConfig {
    pub master_map: ChaoticMap,
    pub slave_map: ChaoticMap,
    pub eta: f64,
    pub length: usize,
    pub transient: usize,
    pub seed: u64,
}

impl CoupledMapConfig {
    /// Skew-tent pair with the training skewness values b1 = 0.65, b2 = 0.47.
    pub fn skew_tent(eta: f64, seed: u64) -> Self {
        Self::tent_pair(0.65, 0.47, eta, seed)
    }

    pub fn tent_pair(b1: f64, b2: f64, eta: f64, seed: u64) -> Self {
        Self {
            master_map: ChaoticMap::SkewTent { b: b1 },
            slave_map: ChaoticMap::SkewTent { b: b2 },
            eta,
            length: DEFAULT_LENGTH,
            transient: DEFAULT_TRANSIENT,
            seed,
        }
    }

    /// Logistic pair with A1 = 4.0, A2 = 3.82.
    pub fn logistic(eta: f64, seed: u64) -> Self {
        Self {
            master_map: ChaoticMap::Logistic { a: 4.0 },
            slave_map: ChaoticMap::Logistic { a: 3.82 },
            eta,
            length: DEFAULT_LENGTH,
            transient: DEFAULT_TRANSIENT,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.master_map.validate()?;
        self.slave_map.validate()?;
        check_eta(self.eta)?;
        check_length(self.length)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledArConfig {
    pub a1: f64,
    pub a2: f64,
    pub gamma: f64,
    pub eta: f64,
    pub length: usize,
    pub transient: usize,
    pub seed: u64,
    /// Fixed `(M(0), S(0))`; drawn uniformly from (0, 1) when absent.
    #[serde(default)]
    pub initial: Option<(f64, f64)>,
}

impl CoupledArConfig {
    /// a1 = 0.8, a2 = 0.9, gamma = 0.03.
    pub fn standard(eta: f64, seed: u64) -> Self {
        Self {
            a1: 0.8,
            a2: 0.9,
            gamma: 0.03,
            eta,
            length: DEFAULT_LENGTH,
            transient: DEFAULT_TRANSIENT,
            seed,
            initial: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) {
            return Err(Error::config(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !self.a1.is_finite() || !self.a2.is_finite() {
            return Err(Error::config("AR coefficients must be finite"));
        }
        check_eta(self.eta)?;
        check_length(self.length)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::config(format!("eta must lie in [0, 1], got {eta}")))
    }
}

fn check_length(length: usize) -> Result<()> {
    if length == 0 {
        Err(Error::config("length must be >= 1"))
    } else {
        Ok(())
    }
}

/// Seed for trial `index` of a run with base seed `base` (splitmix64 finalizer).
pub fn trial_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub fn generate_coupled_map_pair(config: &CoupledMapConfig) -> Result<TimeSeriesPair> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut m = open_unit(&mut rng);
    let mut s = open_unit(&mut rng);
    let eta = config.eta;
    let mut master = Vec::with_capacity(config.length);
    let mut slave = Vec::with_capacity(config.length);
    for n in 0..config.transient + config.length {
        if n > 0 {
            let next_s = (1.0 - eta) * config.slave_map.apply(s) + eta * m;
            m = config.master_map.apply(m);
            s = next_s.clamp(0.0, 1.0);
        }
        if n >= config.transient {
            master.push(m);
            slave.push(s);
        }
    }
    Ok(TimeSeriesPair {
        master,
        slave,
        tag: SystemTag::CoupledMaps {
            master: config.master_map,
            slave: config.slave_map,
            eta,
            seed: config.seed,
        },
    })
}

pub fn generate_coupled_ar_pair(config: &CoupledArConfig) -> Result<TimeSeriesPair> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut m, mut s) = match config.initial {
        Some(init) => init,
        None => (open_unit(&mut rng), open_unit(&mut rng)),
    };
    let mut master = Vec::with_capacity(config.length);
    let mut slave = Vec::with_capacity(config.length);
    for t in 0..config.transient + config.length {
        if t > 0 {
            let r1: f64 = rng.sample(StandardNormal);
            let r2: f64 = rng.sample(StandardNormal);
            let next_s = config.a2 * s + config.eta * m + config.gamma * r2;
            m = config.a1 * m + config.gamma * r1;
            s = next_s;
        }
        if t >= config.transient {
            master.push(m);
            slave.push(s);
        }
    }
    Ok(TimeSeriesPair {
        master,
        slave,
        tag: SystemTag::CoupledAr {
            a1: config.a1,
            a2: config.a2,
            gamma: config.gamma,
            eta: config.eta,
            seed: config.seed,
        },
    })
}

/// Mean absolute difference between master and slave.
pub fn synchronization_error(pair: &TimeSeriesPair) -> Result<f64> {
    if pair.is_empty() {
        return Err(Error::Empty("synchronization error of an empty pair"));
    }
    let total: f64 = pair
        .master
        .iter()
        .zip(&pair.slave)
        .map(|(m, s)| (m - s).abs())
        .sum();
    Ok(total / pair.len() as f64)
}

/// Mean squared difference between the slave and the master delayed by
/// `lag` steps, `mean_n (S(n) - M(n - lag))^2`. With `lag = 1` this tracks
/// the one-step-delayed synchronization the coupling drives towards.
pub fn lagged_synchronization_error(pair: &TimeSeriesPair, lag: usize) -> Result<f64> {
    if pair.len() <= lag {
        return Err(Error::SeriesTooShort {
            len: pair.len(),
            needed: lag + 1,
        });
    }
    let total: f64 = pair.slave[lag..]
        .iter()
        .zip(&pair.master)
        .map(|(s, m)| (s - m).powi(2))
        .sum();
    Ok(total / (pair.len() - lag) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tent_branches() {
        let t = SkewTent::new(0.5).unwrap();
        assert_eq!(t.step(0.25).unwrap(), 0.5);
        assert_eq!(t.step(0.75).unwrap(), 0.5);
        assert_eq!(SkewTent::new(0.65).unwrap().step(0.0).unwrap(), 0.0);
        // x == b is on the decreasing branch and maps to 1
        assert_eq!(SkewTent::new(0.4).unwrap().step(0.4).unwrap(), 1.0);
        assert!(t.step(1.2).is_err());
        assert!(t.step(-0.1).is_err());
        assert!(SkewTent::new(1.0).is_err());
    }

    #[test]
    fn logistic_values() {
        let l4 = Logistic::new(4.0).unwrap();
        assert_eq!(l4.step(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(l4.step(0.2).unwrap(), 0.64, epsilon = 1e-15);
        assert_eq!(Logistic::new(3.82).unwrap().step(0.0).unwrap(), 0.0);
        assert!(l4.step(1.5).is_err());
        assert!(Logistic::new(4.5).is_err());
    }

    #[test]
    fn map_pair_is_deterministic_and_sized() {
        let cfg = CoupledMapConfig::skew_tent(0.4, 11);
        let a = generate_coupled_map_pair(&cfg).unwrap();
        let b = generate_coupled_map_pair(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.master.len(), DEFAULT_LENGTH);
        assert_eq!(a.slave.len(), DEFAULT_LENGTH);
        let c = generate_coupled_map_pair(&CoupledMapConfig::skew_tent(0.4, 12)).unwrap();
        assert_ne!(a.master, c.master);
    }

    #[test]
    fn full_coupling_delays_master() {
        for cfg in [CoupledMapConfig::skew_tent(1.0, 3), CoupledMapConfig::logistic(1.0, 3)] {
            let pair = generate_coupled_map_pair(&cfg).unwrap();
            for i in 1..pair.len() {
                assert_eq!(pair.slave[i], pair.master[i - 1]);
            }
        }
    }

    #[test]
    fn zero_coupling_slave_follows_own_map() {
        let cfg = CoupledMapConfig::skew_tent(0.0, 5);
        let pair = generate_coupled_map_pair(&cfg).unwrap();
        let t2 = SkewTent::new(0.47).unwrap();
        for i in 1..pair.len() {
            assert_eq!(pair.slave[i], t2.step(pair.slave[i - 1]).unwrap());
        }
    }

    #[test]
    fn noise_free_ar_is_geometric() {
        let cfg = CoupledArConfig {
            gamma: 0.0,
            eta: 0.0,
            transient: 0,
            length: 50,
            initial: Some((1.0, 1.0)),
            ..CoupledArConfig::standard(0.0, 0)
        };
        let pair = generate_coupled_ar_pair(&cfg).unwrap();
        let mut m = 1.0;
        let mut s = 1.0;
        for t in 0..50 {
            assert_eq!(pair.master[t], m);
            assert_eq!(pair.slave[t], s);
            assert_abs_diff_eq!(pair.master[t], 0.8f64.powi(t as i32), epsilon = 1e-12);
            m *= 0.8;
            s *= 0.9;
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = CoupledMapConfig::skew_tent(1.5, 0);
        assert!(generate_coupled_map_pair(&cfg).is_err());
        cfg.eta = 0.5;
        cfg.length = 0;
        assert!(generate_coupled_map_pair(&cfg).is_err());
        let ar = CoupledArConfig {
            gamma: -1.0,
            ..CoupledArConfig::standard(0.2, 0)
        };
        assert!(generate_coupled_ar_pair(&ar).is_err());
    }

    #[test]
    fn sync_error_cases() {
        let tag = SystemTag::External;
        let same = TimeSeriesPair::new(vec![0.1, 0.2], vec![0.1, 0.2], tag).unwrap();
        assert_eq!(synchronization_error(&same).unwrap(), 0.0);
        let flip = TimeSeriesPair::new(vec![0.0, 1.0], vec![1.0, 0.0], tag).unwrap();
        assert_eq!(synchronization_error(&flip).unwrap(), 1.0);
        let empty = TimeSeriesPair::new(vec![], vec![], tag).unwrap();
        assert!(synchronization_error(&empty).is_err());
        assert!(TimeSeriesPair::new(vec![0.0], vec![], tag).is_err());
    }

    #[test]
    fn lagged_sync_error_cases() {
        let tag = SystemTag::External;
        let shifted = TimeSeriesPair::new(vec![0.1, 0.5, 0.9], vec![0.0, 0.1, 0.5], tag).unwrap();
        assert_eq!(lagged_synchronization_error(&shifted, 1).unwrap(), 0.0);
        // (0.1-0)^2, (0.5-0.1)^2, (0.9-0.5)^2 averaged
        let zero_lag = lagged_synchronization_error(&shifted, 0).unwrap();
        assert!((zero_lag - (0.01 + 0.16 + 0.16) / 3.0).abs() < 1e-15);
        assert!(lagged_synchronization_error(&shifted, 3).is_err());
        let pair = generate_coupled_map_pair(&CoupledMapConfig::skew_tent(1.0, 5)).unwrap();
        assert_eq!(lagged_synchronization_error(&pair, 1).unwrap(), 0.0);
    }

    #[test]
    fn trial_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(trial_seed(7, 0), trial_seed(8, 0));
    }
}
