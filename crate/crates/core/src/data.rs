//! Toy Bloch-sphere dataset generation and CSV ingestion with range scaling,
//! label mapping, and power-of-two subsampling.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, TrainingSet};
use crate::error::{Error, Result};
use crate::rng::{counter_rng, derive_seed};

const TAG_TOY: u64 = 21;
const TAG_SUBSAMPLE: u64 = 22;
/// Minimum angular distance between a training point and any test point.
pub const TEST_CLEARANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Balance {
    /// Two points per class.
    Balanced,
    /// Three points of class A (+1) and one of class B (-1).
    Unbalanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyDatasetConfig {
    pub seed: u64,
    pub balance: Balance,
    pub num_test: usize,
    pub cluster_spread: f64,
}

impl Default for ToyDatasetConfig {
    fn default() -> Self {
        ToyDatasetConfig { seed: 0, balance: Balance::Balanced, num_test: 30, cluster_spread: 0.15 }
    }
}

/// Points are `(t, phi)`: polar angle `t` along the meridian at longitude `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyDataset {
    pub train: TrainingSet,
    pub test: Dataset,
    pub longitude: f64,
    /// Class centers as feature vectors; A carries label +1.
    pub center_a: Vec<f64>,
    pub center_b: Vec<f64>,
}

/// Wrap an angle into [-pi, pi).
pub fn wrap_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Bloch vector of the feature state RZ(x1) RY(x0) |0>.
pub fn bloch_vector(x: &[f64]) -> [f64; 3] {
    let (t, phi) = (x[0], x[1]);
    [t.sin() * phi.cos(), t.sin() * phi.sin(), t.cos()]
}

pub fn bloch_inner(x: &[f64], z: &[f64]) -> f64 {
    let (u, v) = (bloch_vector(x), bloch_vector(z));
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

pub fn generate_bloch_toy(config: &ToyDatasetConfig) -> Result<ToyDataset> {
    if config.num_test == 0 {
        return Err(Error::InvalidInput("num_test must be at least 1".into()));
    }
    if !(config.cluster_spread >= 0.0 && config.cluster_spread < PI / 2.0) {
        return Err(Error::InvalidInput(format!("cluster spread {} outside [0, pi/2)", config.cluster_spread)));
    }
    let mut rng = counter_rng(derive_seed(config.seed, TAG_TOY), 0);
    let longitude = rng.random_range(-PI..PI);
    let t_a = rng.random_range(-PI..PI);
    let t_b = wrap_angle(t_a + PI);
    let point = |t: f64| vec![t, longitude];

    let test_t: Vec<f64> = (0..config.num_test).map(|k| -PI + 2.0 * PI * k as f64 / config.num_test as f64).collect();
    let center_a = point(t_a);
    let test_points: Vec<Vec<f64>> = test_t.iter().map(|&t| point(t)).collect();
    let test_labels = test_points.iter().map(|x| if bloch_inner(x, &center_a) > 0.0 { 1 } else { -1 }).collect();

    let counts = match config.balance {
        Balance::Balanced => [2, 2],
        Balance::Unbalanced => [3, 1],
    };
    let mut points = Vec::with_capacity(4);
    let mut labels = Vec::with_capacity(4);
    for ((center, label), n) in [(t_a, 1i8), (t_b, -1)].into_iter().zip(counts) {
        for _ in 0..n {
            let t = loop {
                let t = wrap_angle(center + rng.random_range(-1.0..=1.0) * config.cluster_spread);
                if test_t.iter().all(|&s| angular_distance(t, s) >= TEST_CLEARANCE) {
                    break t;
                }
            };
            points.push(point(t));
            labels.push(label);
        }
    }
    Ok(ToyDataset {
        train: TrainingSet::new(points, labels)?,
        test: Dataset::new(test_points, test_labels)?,
        longitude,
        center_a,
        center_b: point(t_b),
    })
}

/// Features and raw label strings from a CSV file with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

pub fn load_csv(path: &Path, label_column: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Csv(format!("label column `{label_column}` not found")))?;
    let feature_names = headers.iter().enumerate().filter(|(i, _)| *i != label_idx).map(|(_, h)| h.to_string()).collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len().saturating_sub(1));
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                labels.push(cell.to_string());
            } else {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::Csv(format!("row {}: column `{}` is not numeric: `{cell}`", r + 2, &headers[c])))?;
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(RawTable { feature_names, rows, labels })
}

/// Per-feature affine map of [min, max] onto [-pi, pi]; a constant feature
/// maps to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaling {
    pub fn identity(dim: usize) -> Scaling {
        Scaling { min: vec![-PI; dim], max: vec![PI; dim] }
    }

    pub fn fit(points: &[Vec<f64>]) -> Result<Scaling> {
        let dim = points.first().ok_or(Error::EmptyDataset)?.len();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            for (k, &v) in p.iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Ok(Scaling { min, max })
    }

    /// Scale one point; values outside the fitted range are clamped.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.min.len() {
            return Err(Error::DimensionMismatch { expected: self.min.len(), found: x.len() });
        }
        Ok(x
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (lo, hi) = (self.min[k], self.max[k]);
                if hi > lo {
                    (-PI + 2.0 * PI * (v - lo) / (hi - lo)).clamp(-PI, PI)
                } else {
                    0.0
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessRules {
    /// Label values mapped to +1; all others map to -1.
    pub positive_labels: Vec<String>,
    /// Training-set size, a power of two.
    pub m: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: TrainingSet,
    /// None when every row went to training.
    pub test: Option<Dataset>,
    pub scaling: Scaling,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

pub fn map_labels(raw: &[String], positive: &[String]) -> Vec<i8> {
    let pos: BTreeSet<&str> = positive.iter().map(String::as_str).collect();
    raw.iter().map(|l| if pos.contains(l.as_str()) { 1 } else { -1 }).collect()
}

/// Seeded subsample of `m` rows for training (in ascending row order), the
/// rest for testing; scaling is fit on the training rows only.
pub fn preprocess(table: &RawTable, rules: &PreprocessRules) -> Result<Split> {
    let n = table.rows.len();
    if !rules.m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(rules.m));
    }
    if rules.m > n {
        return Err(Error::InvalidInput(format!("requested M = {} exceeds {n} rows", rules.m)));
    }
    let labels = map_labels(&table.labels, &rules.positive_labels);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut counter_rng(derive_seed(rules.seed, TAG_SUBSAMPLE), 0));
    let mut train_rows = order[..rules.m].to_vec();
    let mut test_rows = order[rules.m..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();

    let raw_train: Vec<Vec<f64>> = train_rows.iter().map(|&r| table.rows[r].clone()).collect();
    let scaling = Scaling::fit(&raw_train)?;
    let scale = |rows: &[usize]| -> Result<(Vec<Vec<f64>>, Vec<i8>)> {
        let pts = rows.iter().map(|&r| scaling.apply(&table.rows[r])).collect::<Result<Vec<_>>>()?;
        Ok((pts, rows.iter().map(|&r| labels[r]).collect()))
    };
    let (tp, tl) = scale(&train_rows)?;
    let test = if test_rows.is_empty() {
        None
    } else {
        let (sp, sl) = scale(&test_rows)?;
        Some(Dataset::new(sp, sl)?)
    };
    Ok(Split { train: TrainingSet::new(tp, tl)?, test, scaling, train_rows, test_rows })
}

pub const DATASET_SCHEMA_VERSION: u32 = 1;

fn dataset_schema_version() -> u32 {
    DATASET_SCHEMA_VERSION
}

/// JSON interchange form `{schema_version, points, labels, scaling{min, max}}`.
/// A missing `schema_version` reads as the current version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    #[serde(default = "dataset_schema_version")]
    pub schema_version: u32,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<i8>,
    pub scaling: Scaling,
}

impl DatasetFile {
    pub fn new(ds: &Dataset, scaling: &Scaling) -> DatasetFile {
        DatasetFile {
            schema_version: DATASET_SCHEMA_VERSION,
            points: ds.points().to_vec(),             labels: ds.labels().to_vec(),
            scaling: scaling.clone(),
        }
    }

    pub fn dataset(&self) -> Result<Dataset> {
        Dataset::new(self.points.clone(), self.labels.clone())
    }

    pub fn training_set(&self) -> Result<TrainingSet> {
        TrainingSet::from_dataset(self.dataset()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<DatasetFile> {
        let file: DatasetFile = serde_json::from_str(text)?;
        if file.schema_version != DATASET_SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!("unsupported dataset schema version {}", file.schema_version)));
        }
        Ok(file)
    }
}
