//! Gate-level resource scaling of the loss circuit over the training size M.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::assembly::build_loss_circuit;
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::feature_map::FeatureMapSpec;
use crate::gate::GateKind;
use crate::rng::{counter_rng, derive_seed};

const TAG_SCALING: u64 = 31;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    /// Training-set size M.
    pub m_size: usize,
    pub qubits: usize,
    /// Depth after rewriting over {RX, RY, RZ, CNOT}.
    pub depth: usize,
    pub cnots: usize,
    pub gates: usize,
}

/// Seeded random training set of size `mm` with features in [-pi, pi].
pub fn random_training_set(mm: usize, fmap: &FeatureMapSpec, seed: u64) -> Result<TrainingSet> {
    let mut rng = counter_rng(derive_seed(seed, TAG_SCALING), mm as u64);
    let points = (0..mm)
        .map(|_| (0..fmap.feature_dim()).map(|_| rng.random_range(-PI..PI)).collect())
        .collect();
    let labels = (0..mm).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    TrainingSet::new(points, labels)
}

/// Basis-decomposed metrics of one loss circuit on a random size-`mm` set.
pub fn loss_circuit_metrics(mm: usize, fmap: &FeatureMapSpec, layers: usize, seed: u64) -> Result<ScalingRow> {
    let set = random_training_set(mm, fmap, seed)?;
    let ansatz = AnsatzSpec::new(set.m(), layers)?;
    let mut rng = counter_rng(derive_seed(seed, TAG_SCALING + 1), mm as u64);
    let theta: Vec<f64> = (0..ansatz.num_params()).map(|_| rng.random_range(-PI..PI)).collect();
    let circ = build_loss_circuit(&set, fmap, &ansatz, &theta)?.decomposed();
    Ok(ScalingRow {
        m_size: mm,
        qubits: circ.num_qubits(),
        depth: circ.depth(),
        cnots: circ.gate_counts().get(&GateKind::Cnot).copied().unwrap_or(0),
        gates: circ.gates().len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares y = slope * x + intercept with coefficient of
/// determination r2 (1 when y is constant and fitted exactly).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples(xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("linear fit needs at least two distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r2 })
}
