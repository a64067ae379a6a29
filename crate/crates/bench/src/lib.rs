//! Shared fixtures for the benchmarks.

use vqasvm::scaling::random_training_set;
use vqasvm::{AnsatzSpec, FeatureMapSpec, TrainingSet};

/// Seeded training set with a fixed-parameter ansatz for size `mm`.
pub fn fixture(mm: usize, fmap: &FeatureMapSpec, layers: usize) -> (TrainingSet, AnsatzSpec, Vec<f64>) {
    let set = random_training_set(mm, fmap, 7).expect("power-of-two size");
    let ansatz = AnsatzSpec::new(set.m(), layers).expect("valid ansatz");
    let theta = (0..ansatz.num_params()).map(|k| 0.1 * k as f64 - 0.4).collect();
    (set, ansatz, theta)
}
