//! Bivariate causality measures.

mod ccc;
mod etc;
mod granger;

use serde::Serialize;

pub use ccc::{ccc, ccc_symbols, symbolize, CccConfig};
pub use etc::{etc, etc_joint, etc_joint_normalized, etc_normalized, SymbolSequence};
pub use granger::{granger, granger_at_order, select_order, var_aic, GcConfig, GrangerResult};

use crate::error::{Error, Result};

/// Which way a statistic was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    MasterToSlave,
    SlaveToMaster,
}

impl Direction {
    pub fn label(&self) -> &'static str {
        match self {
            Direction::MasterToSlave => "master->slave",
            Direction::SlaveToMaster => "slave->master",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-trial values of one directional statistic with their summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalityReport {
    pub direction: Direction,
    pub statistic: &'static str,
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std_dev: f64,
}

impl CausalityReport {
    pub fn new(direction: Direction, statistic: &'static str, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("causality report without trials"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            direction,
            statistic,
            values,
            mean,
            std_dev,
        })
    }

    pub fn trials(&self) -> usize {
        self.values.len()
    }

    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.values.len() as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_summary() {
        let r = CausalityReport::new(Direction::MasterToSlave, "F", vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.mean, 2.0);
        assert_eq!(r.std_dev, 1.0);
        assert_eq!(r.trials(), 3);
        assert!(CausalityReport::new(Direction::SlaveToMaster, "F", vec![]).is_err());
    }
}
