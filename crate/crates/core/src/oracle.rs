//! Dataset oracle U_{phi,S}: |i>|0>|0> -> |i>|phi(x_i)>|y_i>.
//!
//! Every rotation of the feature-map template becomes a multiplexed rotation
//! over the index register; the label qubit gets a multiplexed RX(pi) for
//! y = +1 and RX(0) for y = -1, so y = +1 is stored as |1>.

use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::feature_map::{FeatureMapSpec, TemplateOp};
use crate::gate::{Axis, Gate};
use crate::linalg::{C64, ZERO};
use crate::multiplexer::multiplexed_rotation;
use crate::statevector::StateVector;

pub fn label_bit(y: i8) -> usize {
    usize::from(y > 0)
}

fn check_set(set: &TrainingSet, fmap: &FeatureMapSpec) -> Result<()> {
    fmap.validate()?;
    set.points().iter().try_for_each(|x| fmap.check_features(x))
}

/// Oracle gates on explicit qubits.
pub fn oracle_gates(
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    index: &[usize],
    data: &[usize],
    label: usize,
) -> Result<Vec<Gate>> {
    check_set(set, fmap)?;
    if index.len() != set.m() {
        return Err(Error::DimensionMismatch { expected: set.m(), found: index.len() });
    }
    if data.len() != fmap.n {
        return Err(Error::DimensionMismatch { expected: fmap.n, found: data.len() });
    }
    let mut gates = Vec::new();
    for op in fmap.template() {
        match op {
            TemplateOp::Fixed(g) => gates.push(g.remap(data)),
            TemplateOp::Rotation { axis, qubit, angle } => {
                let angles: Vec<f64> = set.points().iter().map(|x| angle.eval(x)).collect();
                gates.extend(multiplexed_rotation(&angles, axis, index, data[qubit])?);
            }
        }
    }
    let flips: Vec<f64> = set.labels().iter().map(|&y| PI * label_bit(y) as f64).collect();
    gates.extend(multiplexed_rotation(&flips, Axis::X, index, label)?);
    Ok(gates)
}

/// Oracle circuit on registers `i` (m), `x` (n), `y` (1).
pub fn build_dataset_oracle(set: &TrainingSet, fmap: &FeatureMapSpec) -> Result<Circuit> {
    let mut circ = Circuit::with_registers(&[("i", set.m()), ("x", fmap.n), ("y", 1)])?;
    let (i, x, y) = (circ.reg("i")?, circ.reg("x")?, circ.reg("y")?[0]);
    circ.extend(oracle_gates(set, fmap, &i, &x, y)?)?;
    Ok(circ)
}

/// sum_i sqrt(w_i) |i>|phi(x_i)>|y_i> in the `build_dataset_oracle` layout,
/// built by direct state construction.
pub fn direct_oracle_state(set: &TrainingSet, fmap: &FeatureMapSpec, weights: &[f64]) -> Result<StateVector> {
    check_set(set, fmap)?;
    if weights.len() != set.len() {
        return Err(Error::DimensionMismatch { expected: set.len(), found: weights.len() });
    }
    let (m, n) = (set.m(), fmap.n);
    let mut amps = vec![ZERO; 1usize << (m + n + 1)];
    for (i, (x, &y)) in set.points().iter().zip(set.labels()).enumerate() {
        let phi = fmap.state(x)?;
        let w = C64::new(weights[i].max(0.0).sqrt(), 0.0);
        for (d, a) in phi.amplitudes().iter().enumerate() {
            amps[i | (d << m) | (label_bit(y) << (m + n))] = w * a;
        }
    }
    StateVector::from_amplitudes(amps)
}
