//! Compression-Complexity Causality.
//!
//! For every window start `t` (stepping by `w` from `L` up to `len - delta`)
//! with `Y_past = y[t-L..t)`, `dY = y[t..t+delta)` and `X_past = x[t-L..t)`:
//!
//! ```text
//! CC(dY | Y_past)        = ETC(Y_past ++ dY) - ETC(Y_past)
//! CC(dY | Y_past,X_past) = ETC2(Y_past ++ dY, X_past ++ dY) - ETC2(Y_past, X_past)
//! CCC(x -> y)            = mean_t [ CC(dY | Y_past) - CC(dY | Y_past,X_past) ]
//! ```
//!
//! using length-normalized ETC throughout. Both series are binned once over
//! their full range so every window shares the same alphabet.

use serde::{Deserialize, Serialize};

use super::etc::{etc_joint_normalized, etc_normalized, SymbolSequence};
use crate::chaosfex::min_max;
use crate::error::{Error, Result};

/// Equal-width binning of `[min, max]` into `bins` bins; the maximum goes
/// to the last bin.
pub fn symbolize(series: &[f64], bins: usize) -> Result<SymbolSequence> {
    if bins < 2 {
        return Err(Error::config(format!("need at least 2 bins, got {bins}")));
    }
    let (lo, hi) = min_max(series.iter().copied()).ok_or(Error::Empty("series to symbolize"))?;
    if !(hi > lo) {
        return Err(Error::DegenerateRange { lo, hi });
    }
    let width = hi - lo;
    let top = (bins - 1) as u32;
    let symbols = series
        .iter()
        .map(|&x| {
            let k = ((x - lo) / width * bins as f64).floor();
            (k.max(0.0) as u32).min(top)
        })
        .collect();
    SymbolSequence::new(symbols, bins as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CccConfig {
    /// Past window length `L`.
    pub past: usize,
    /// Window step `w`.
    pub step: usize,
    /// Future window length `delta`.
    pub future: usize,
    /// Number of bins `B`.
    pub bins: usize,
}

impl CccConfig {
    pub fn new(past: usize, step: usize, future: usize, bins: usize) -> Self {
        Self {
            past,
            step,
            future,
            bins,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.past == 0 || self.step == 0 || self.future == 0 {
            return Err(Error::config("CCC window lengths and step must be >= 1"));
        }
        if self.bins < 2 {
            return Err(Error::config("CCC needs at least 2 bins"));
        }
        Ok(())
    }
}

impl Default for CccConfig {
    fn default() -> Self {
        Self::new(100, 15, 50, 4)
    }
}

/// CCC from `x` to `y` on already symbolized series.
pub fn ccc_symbols(x: &SymbolSequence, y: &SymbolSequence, config: &CccConfig) -> Result<f64> {
    config.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let (l, d) = (config.past, config.future);
    if y.len() < l + d {
        return Err(Error::SeriesTooShort {
            len: y.len(),
            needed: l + d,
        });
    }
    let mut total = 0.0;
    let mut windows = 0usize;
    let mut t = l;
    while t + d <= y.len() {
        let y_past = y.slice(t - l, t);
        let x_past = x.slice(t - l, t);
        let dy = y.slice(t, t + d);
        let y_ext = y_past.concat(&dy);
        let x_ext = x_past.concat(&dy);
        let cc_own = etc_normalized(&y_ext)? - etc_normalized(&y_past)?;
        let cc_joint = etc_joint_normalized(&y_ext, &x_ext)? - etc_joint_normalized(&y_past, &x_past)?;
        total += cc_own - cc_joint;
        windows += 1;
        t += config.step;
    }
    Ok(total / windows as f64)
}

/// CCC from `x` to `y`. Positive values mean the past of `x` lowers the
/// compression complexity of `y`'s future; the magnitude is the strength.
pub fn ccc(x: &[f64], y: &[f64], config: &CccConfig) -> Result<f64> {
    config.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if y.len() < config.past + config.future {
        return Err(Error::SeriesTooShort {
            len: y.len(),
            needed: config.past + config.future,
        });
    }
    let sx = symbolize(x, config.bins)?;
    let sy = symbolize(y, config.bins)?;
    ccc_symbols(&sx, &sy, config)
}
