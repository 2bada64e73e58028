use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::dynamics::TimeSeriesPair;
use crate::error::{Error, Result};

/// Masters are class 0 (cause), slaves class 1 (effect).
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Dataset,
    pub test: Dataset,
    /// Trial indices whose master / slave went to the training set.
    pub train_masters: Vec<usize>,
    pub train_slaves: Vec<usize>,
}

/// Training masters and slaves for `trials` pairs: 801 and 799 of 1000,
/// scaled proportionally otherwise.
pub fn train_counts(trials: usize) -> (usize, usize) {
    let masters = (trials as f64 * 0.801).round() as usize;
    let total = (trials as f64 * 1.6).round() as usize;
    (masters.min(trials), (total - masters).min(trials))
}

/// Every master (class 0) and slave (class 1) of `pairs`, unsplit.
pub fn pairs_dataset(pairs: &[TimeSeriesPair]) -> Result<Dataset> {
    let instances = pairs
        .iter()
        .map(|p| p.master.clone())
        .chain(pairs.iter().map(|p| p.slave.clone()))
        .collect();
    let labels = std::iter::repeat_n(0, pairs.len())
        .chain(std::iter::repeat_n(1, pairs.len()))
        .collect();
    Dataset::new(instances, labels)
}

/// Seeded stratified split of the `2 * trials` instances.
pub fn split_train_test(pairs: &[TimeSeriesPair], seed: u64) -> Result<DatasetSplit> {
    let n = pairs.len();
    let (n_masters, n_slaves) = train_counts(n);
    if n_masters == 0 || n_slaves == 0 || n_masters == n || n_slaves == n {
        return Err(Error::config(format!(
            "{n} trials cannot be split into non-empty train and test classes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masters: Vec<usize> = (0..n).collect();
    masters.shuffle(&mut rng);
    let mut slaves: Vec<usize> = (0..n).collect();
    slaves.shuffle(&mut rng);
    let mut train_masters = masters[..n_masters].to_vec();
    let mut train_slaves = slaves[..n_slaves].to_vec();
    train_masters.sort_unstable();
    train_slaves.sort_unstable();
    let mut test_masters = masters[n_masters..].to_vec();
    let mut test_slaves = slaves[n_slaves..].to_vec();
    test_masters.sort_unstable();
    test_slaves.sort_unstable();

    let build = |m: &[usize], s: &[usize]| {
        let instances = m
            .iter()
            .map(|&i| pairs[i].master.clone())
            .chain(s.iter().map(|&i| pairs[i].slave.clone()))
            .collect();
        let labels = std::iter::repeat_n(0, m.len()).chain(std::iter::repeat_n(1, s.len())).collect();
        Dataset::new(instances, labels)
    };
    Ok(DatasetSplit {
        train: build(&train_masters, &train_slaves)?,
        test: build(&test_masters, &test_slaves)?,
        train_masters,
        train_slaves,
    })
}
