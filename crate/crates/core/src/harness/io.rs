use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::experiments::TrialFailure;
use super::ExperimentConfig;
use crate::causality::{ccc, CccConfig};
use crate::chaosfex::{firing_times, NeurochaosConfig, Normalization};
use crate::dynamics::{SystemTag, TimeSeriesPair};
use crate::error::{Error, Result};

/// Run metadata written next to every result file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    /// Every generation seed used, in row order.
    pub seeds: Vec<u64>,
    /// Command options not covered by `config`.
    pub parameters: BTreeMap<String, String>,
    pub config: Option<ExperimentConfig>,
    pub failures: Vec<TrialFailure>,
}

impl Manifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            ..Self::default()
        }
    }

    pub fn with_config(mut self, config: &ExperimentConfig) -> Self {
        self.config = Some(config.clone());
        self
    }

    pub fn parameter(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format {
            what: "manifest".into(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Format {
            what: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }
}

/// `results.csv` -> `results.csv.manifest.toml`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.toml");
    path.with_file_name(name)
}

/// Writes `rows` as CSV with a header and the manifest as a sidecar.
pub fn export_results<T: Serialize>(rows: &[T], path: &Path, manifest: &Manifest) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("result rows to export"));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    manifest.save(&manifest_path(path))
}

pub fn read_results<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Experiment configuration from a TOML file; missing keys take defaults.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config: ExperimentConfig = toml::from_str(&text).map_err(|e| Error::Format {
        what: path.display().to_string(),
        reason: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesRow {
    index: usize,
    master: f64,
    slave: f64,
}

fn eta_dir(dir: &Path, eta: f64) -> PathBuf {
    dir.join(format!("eta_{eta:.2}"))
}

/// Writes each pair to `dir/eta_<eta>/trial_<i>.csv` (`index,master,slave`).
pub fn write_trial_dir(dir: &Path, eta: f64, pairs: &[TimeSeriesPair]) -> Result<Vec<PathBuf>> {
    let sub = eta_dir(dir, eta);
    fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    let mut paths = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let path = sub.join(format!("trial_{i:04}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        for (index, (&master, &slave)) in pair.master.iter().zip(&pair.slave).enumerate() {
            w.serialize(SeriesRow { index, master, slave })?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

fn read_pair(path: &Path) -> Result<TimeSeriesPair> {
    let rows: Vec<SeriesRow> = read_results(path)?;
    let (master, slave) = rows.into_iter().map(|r| (r.master, r.slave)).unzip();
    TimeSeriesPair::new(master, slave, SystemTag::External)
}

/// Reads a directory written by [`write_trial_dir`], grouped by eta in
/// ascending order with trials in file-name order.
pub fn read_trial_dir(dir: &Path) -> Result<Vec<(f64, Vec<TimeSeriesPair>)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut groups = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(eta) = name.strip_prefix("eta_").and_then(|s| s.parse::<f64>().ok()) else {
            continue;
        };
        let mut files: Vec<PathBuf> = fs::read_dir(entry.path())
            .map_err(|e| Error::io(entry.path(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        let pairs = files.iter().map(|p| read_pair(p)).collect::<Result<Vec<_>>>()?;
        if !pairs.is_empty() {
            groups.push((eta, pairs));
        }
    }
    if groups.is_empty() {
        return Err(Error::Format {
            what: dir.display().to_string(),
            reason: "no eta_<value> subdirectories with trial CSVs".into(),
        });
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(groups)
}

/// Rows expected in the prey-predator file and the leading transient dropped.
pub const PREY_PREDATOR_ROWS: usize = 71;
pub const PREY_PREDATOR_TRANSIENT: usize = 9;

/// Reads `time,prey,predator` and drops the first 9 rows. The predator
/// series is returned as the master, the prey as the slave.
pub fn load_prey_predator(path: &Path) -> Result<TimeSeriesPair> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    column("time")?;
    let (prey_col, predator_col) = (column("prey")?, column("predator")?);
    let mut prey = Vec::new();
    let mut predator = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let parse = |col: usize, name: &str| -> Result<f64> {
            let field = record.get(col).unwrap_or("");
            field.parse().map_err(|_| Error::Format {
                what: path.display().to_string(),
                reason: format!("row {}: {name} value {field:?} is not a number", line + 1),
            })
        };
        prey.push(parse(prey_col, "prey")?);
        predator.push(parse(predator_col, "predator")?);
    }
    if prey.len() != PREY_PREDATOR_ROWS {
        log::warn!(
            "{}: expected {PREY_PREDATOR_ROWS} rows, found {}; continuing",
            path.display(),
            prey.len()
        );
    }
    if prey.len() <= PREY_PREDATOR_TRANSIENT {
        return Err(Error::SeriesTooShort {
            len: prey.len(),
            needed: PREY_PREDATOR_TRANSIENT + 1,
        });
    }
    TimeSeriesPair::new(
        predator.split_off(PREY_PREDATOR_TRANSIENT),
        prey.split_off(PREY_PREDATOR_TRANSIENT),
        SystemTag::External,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreyPredatorReport {
    pub raw_predator_to_prey: f64,
    pub raw_prey_to_predator: f64,
    pub firing_predator_to_prey: f64,
    pub firing_prey_to_predator: f64,
}

/// CCC on the raw series and on their firing times (each series scaled by
/// its own extremes before firing).
pub fn prey_predator_ccc(
    pair: &TimeSeriesPair,
    raw: &CccConfig,
    neurochaos: &NeurochaosConfig,
    firing: &CccConfig,
) -> Result<PreyPredatorReport> {
    let (predator, prey) = (&pair.master, &pair.slave);
    let ft = |s: &[f64]| firing_times(&Normalization::PerInstance.apply(s)?, neurochaos);
    let (ft_predator, ft_prey) = (ft(predator)?, ft(prey)?);
    Ok(PreyPredatorReport {
        raw_predator_to_prey: ccc(predator, prey, raw)?,
        raw_prey_to_predator: ccc(prey, predator, raw)?,
        firing_predator_to_prey: ccc(&ft_predator, &ft_prey, firing)?,
        firing_prey_to_predator: ccc(&ft_prey, &ft_predator, firing)?,
    })
}
