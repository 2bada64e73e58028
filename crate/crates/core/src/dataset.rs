use crate::error::{Error, Result};

/// Labeled equal-length instances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub instances: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(instances: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if instances.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: instances.len(),
                actual: labels.len(),
            });
        }
        if let Some(first) = instances.first() {
            if let Some(bad) = instances.iter().find(|i| i.len() != first.len()) {
                return Err(Error::LengthMismatch {
                    expected: first.len(),
                    actual: bad.len(),
                });
            }
        }
        Ok(Self { instances, labels })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Length of each instance (0 for an empty set).
    pub fn instance_len(&self) -> usize {
        self.instances.first().map_or(0, Vec::len)
    }

    /// `max label + 1`.
    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.instances
            .iter()
            .map(Vec::as_slice)
            .zip(self.labels.iter().copied())
    }
}
