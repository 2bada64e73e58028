//! Bivariate Granger causality by ordinary least squares.
//!
//! The model order is chosen by AIC over the bivariate VAR on a common
//! estimation sample. For the selected order `p` the restricted regression
//! of `y(t)` on its own `p` lags and the full regression that adds `p` lags
//! of `x` are fitted, and the F-statistic and log residual ratio reported.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

/// Pivots below this fraction of the column's own squared norm are treated
/// as linear dependence.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcConfig {
    pub max_order: usize,
    pub alpha: f64,
}

impl Default for GcConfig {
    fn default() -> Self {
        Self {
            max_order: 30,
            alpha: 0.05,
        }
    }
}

impl GcConfig {
    pub fn with_max_order(max_order: usize) -> Self {
        Self {
            max_order,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::config("max_order must be >= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrangerResult {
    pub order: usize,
    /// Number of regression rows `T = n - p`.
    pub samples: usize,
    pub rss_restricted: f64,
    pub rss_full: f64,
    pub f_statistic: f64,
    /// `ln(RSS_r / RSS_f)`.
    pub log_ratio: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
    pub significant: bool,
}

/// Design with an intercept and lags `1..=order` of each series, interleaved
/// per lag (`y(t-1), x(t-1), y(t-2), ...`), for targets `t = start..n`.
fn lag_design(series: &[&[f64]], order: usize, start: usize) -> Vec<Vec<f64>> {
    let n = series[0].len();
    (start..n)
        .map(|t| {
            let mut row = Vec::with_capacity(1 + order * series.len());
            row.push(1.0);
            for lag in 1..=order {
                for s in series {
                    row.push(s[t - lag]);
                }
            }
            row
        })
        .collect()
}

fn gram(rows: &[Vec<f64>]) -> Vec<f64> {
    let k = rows[0].len();
    let mut g = vec![0.0; k * k];
    for r in rows {
        for i in 0..k {
            let ri = r[i];
            for j in 0..=i {
                g[i * k + j] += ri * r[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            g[j * k + i] = g[i * k + j];
        }
    }
    g
}

fn cross(rows: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let k = rows[0].len();
    let mut c = vec![0.0; k];
    for (r, &y) in rows.iter().zip(target) {
        for (ci, ri) in c.iter_mut().zip(r) {
            *ci += ri * y;
        }
    }
    c
}

/// Lower Cholesky factor of the leading principal block that is numerically
/// positive definite. Returns the factor and that block's size.
fn cholesky_prefix(g: &[f64], k: usize) -> (Vec<f64>, usize) {
    let mut l = vec![0.0; k * k];
    for j in 0..k {
        let mut d = g[j * k + j];
        for m in 0..j {
            d -= l[j * k + m] * l[j * k + m];
        }
        if !(d > RANK_TOL * g[j * k + j]) {
            return (l, j);
        }
        let djj = d.sqrt();
        l[j * k + j] = djj;
        for i in j + 1..k {
            let mut s = g[i * k + j];
            for m in 0..j {
                s -= l[i * k + m] * l[j * k + m];
            }
            l[i * k + j] = s / djj;
        }
    }
    (l, k)
}

/// Solves `L z = c` for the first `size` entries.
fn forward(l: &[f64], k: usize, c: &[f64], size: usize) -> Vec<f64> {
    let mut z = vec![0.0; size];
    for i in 0..size {
        let mut s = c[i];
        for m in 0..i {
            s -= l[i * k + m] * z[m];
        }
        z[i] = s / l[i * k + i];
    }
    z
}

fn backward(l: &[f64], k: usize, z: &[f64]) -> Vec<f64> {
    let size = z.len();
    let mut beta = vec![0.0; size];
    for i in (0..size).rev() {
        let mut s = z[i];
        for m in i + 1..size {
            s -= l[m * k + i] * beta[m];
        }
        beta[i] = s / l[i * k + i];
    }
    beta
}

/// Least-squares residual sum of squares of `target` on `rows`.
fn ols_rss(rows: &[Vec<f64>], target: &[f64]) -> Result<f64> {
    let k = rows[0].len();
    let g = gram(rows);
    let (l, rank) = cholesky_prefix(&g, k);
    if rank < k {
        return Err(Error::RankDeficient { column: rank });
    }
    let beta = backward(&l, k, &forward(&l, k, &cross(rows, target), k));
    Ok(rows
        .iter()
        .zip(target)
        .map(|(r, &y)| {
            let fit: f64 = r.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (y - fit) * (y - fit)
        })
        .sum())
}

fn check_inputs(x: &[f64], y: &[f64], max_order: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let needed = 2 * max_order + 3;
    if y.len() < needed {
        return Err(Error::SeriesTooShort {
            len: y.len(),
            needed,
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            value: f64::NAN,
            domain: "finite values",
        });
    }
    Ok(())
}

/// AIC of the bivariate VAR for every admissible order `1..=max_order`,
/// all fitted on the common sample `t = max_order..n`.
pub fn var_aic(x: &[f64], y: &[f64], max_order: usize) -> Result<Vec<(usize, f64)>> {
    check_inputs(x, y, max_order)?;
    let rows = lag_design(&[y, x], max_order, max_order);
    let t_common = rows.len();
    let k = rows[0].len();
    let ty = &y[max_order..];
    let tx = &x[max_order..];
    let g = gram(&rows);
    let (l, rank) = cholesky_prefix(&g, k);
    let zy = forward(&l, k, &cross(&rows, ty), rank);
    let zx = forward(&l, k, &cross(&rows, tx), rank);
    let yy: f64 = ty.iter().map(|v| v * v).sum();
    let xx: f64 = tx.iter().map(|v| v * v).sum();
    let xy: f64 = ty.iter().zip(tx).map(|(a, b)| a * b).sum();
    let tf = t_common as f64;

    let mut out = Vec::new();
    for p in 1..=max_order {
        let cols = 1 + 2 * p;
        if cols > rank || t_common <= cols {
            break;
        }
        let dot = |a: &[f64], b: &[f64]| -> f64 { a[..cols].iter().zip(&b[..cols]).map(|(u, v)| u * v).sum() };
        let s_yy = (yy - dot(&zy, &zy)).max(0.0) / tf;
        let s_xx = (xx - dot(&zx, &zx)).max(0.0) / tf;
        let s_xy = (xy - dot(&zy, &zx)) / tf;
        let det = s_yy * s_xx - s_xy * s_xy;
        let log_det = if det > 0.0 { det.ln() } else { f64::NEG_INFINITY };
        out.push((p, log_det + 2.0 * (4 * p) as f64 / tf));
    }
    if out.is_empty() {
        if rank < 3 {
            return Err(Error::RankDeficient { column: rank });
        }
        return Err(Error::OrderSelection { max_order });
    }
    Ok(out)
}

/// Order in `1..=max_order` minimizing the VAR AIC (smallest on ties).
pub fn select_order(x: &[f64], y: &[f64], max_order: usize) -> Result<usize> {
    let table = var_aic(x, y, max_order)?;
    let mut best = table[0];
    for &(p, aic) in &table[1..] {
        if aic < best.1 {
            best = (p, aic);
        }
    }
    Ok(best.0)
}

/// Restricted and full regressions of `y` at a fixed order.
pub fn granger_at_order(x: &[f64], y: &[f64], order: usize, alpha: f64) -> Result<GrangerResult> {
    check_inputs(x, y, order)?;
    let target = &y[order..];
    let full_rows = lag_design(&[y, x], order, order);
    let restricted_rows = lag_design(&[y], order, order);
    let rss_full = ols_rss(&full_rows, target)?;
    let rss_restricted = ols_rss(&restricted_rows, target)?;
    let samples = target.len();
    let df_num = order;
    let df_den = samples - 2 * order - 1;
    let gain = (rss_restricted - rss_full).max(0.0);
    let f_statistic = if rss_full > 0.0 {
        (gain / df_num as f64) / (rss_full / df_den as f64)
    } else if gain > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let log_ratio = if rss_full > 0.0 && rss_restricted > 0.0 {
        (rss_restricted / rss_full).ln().max(0.0)
    } else if rss_restricted > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let p_value = if f_statistic.is_infinite() {
        0.0
    } else {
        FisherSnedecor::new(df_num as f64, df_den as f64)
            .map_err(|e| Error::config(e.to_string()))?
            .sf(f_statistic)
    };
    Ok(GrangerResult {
        order,
        samples,
        rss_restricted,
        rss_full,
        f_statistic,
        log_ratio,
        df_num,
        df_den,
        p_value,
        significant: p_value < alpha,
    })
}

/// Granger causality from `x` to `y`.
pub fn granger(x: &[f64], y: &[f64], config: &GcConfig) -> Result<GrangerResult> {
    config.validate()?;
    let order = select_order(x, y, config.max_order)?;
    granger_at_order(x, y, order, config.alpha)
}
