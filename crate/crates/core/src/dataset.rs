//! Labeled point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labeled points with labels in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    labels: Vec<i8>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<i8>) -> Result<Dataset> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: labels.len() });
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite feature value".into()));
            }
        }
        if let Some(l) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::InvalidInput(format!("label {l} is not -1 or +1")));
        }
        Ok(Dataset { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i] as f64
    }

    pub fn with_flipped_labels(&self) -> Dataset {
        Dataset { points: self.points.clone(), labels: self.labels.iter().map(|l| -l).collect() }
    }
}

impl<'de> Deserialize<'de> for TrainingSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ds = Dataset::deserialize(d)?;
        TrainingSet::from_dataset(ds).map_err(serde::de::Error::custom)
    }
}

/// A dataset whose size is a power of two, M = 2^m.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TrainingSet(Dataset);

impl TrainingSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<i8>) -> Result<TrainingSet> {
        Self::from_dataset(Dataset::new(points, labels)?)
    }

    pub fn from_dataset(ds: Dataset) -> Result<TrainingSet> {
        if !ds.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(ds.len()));
        }
        Ok(TrainingSet(ds))
    }

    /// Index-register width m = log2 M.
    pub fn m(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    pub fn dataset(&self) -> &Dataset {
        &self.0
    }

    pub fn with_flipped_labels(&self) -> TrainingSet {
        TrainingSet(self.0.with_flipped_labels())
    }
}

impl std::ops::Deref for TrainingSet {
    type Target = Dataset;
    fn deref(&self) -> &Dataset {
        &self.0
    }
}
