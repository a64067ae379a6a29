//! Feature maps x -> |phi(x)>.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Axis, Gate};
use crate::statevector::StateVector;

const RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureMapKind {
    Bloch,
    Zz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    /// Data qubits.
    pub n: usize,
    pub reps: usize,
}

/// Angle of one template rotation as a function of the features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `x_i`
    Feature(usize),
    /// `2 x_i`
    Double(usize),
    /// `2 (pi - x_i)(pi - x_j)`
    Pair(usize, usize),
}

impl Angle {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Angle::Feature(i) => x[i],
            Angle::Double(i) => 2.0 * x[i],
            Angle::Pair(i, j) => 2.0 * (PI - x[i]) * (PI - x[j]),
        }
    }
}

/// One step of a feature-map template over data-local qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub enum TemplateOp {
    Fixed(Gate),
    Rotation { axis: Axis, qubit: usize, angle: Angle },
}

impl FeatureMapSpec {
    /// One qubit, `x = (latitude, longitude)`.
    pub fn bloch() -> FeatureMapSpec {
        FeatureMapSpec { kind: FeatureMapKind::Bloch, n: 1, reps: 1 }
    }

    pub fn zz(n: usize, reps: usize) -> Result<FeatureMapSpec> {
        let spec = FeatureMapSpec { kind: FeatureMapKind::Zz, n, reps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FeatureMapKind::Bloch if self.n != 1 => {
                Err(Error::InvalidInput("the Bloch map uses exactly one qubit".into()))
            }
            FeatureMapKind::Zz if self.n < 2 => {
                Err(Error::InvalidInput("the ZZ map needs at least two qubits".into()))
            }
            _ if self.reps == 0 => Err(Error::InvalidInput("reps must be at least 1".into())),
            _ => Ok(()),
        }
    }

    pub fn feature_dim(&self) -> usize {
        match self.kind {
            FeatureMapKind::Bloch => 2,
            FeatureMapKind::Zz => self.n,
        }
    }

    pub fn check_features(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch { expected: self.feature_dim(), found: x.len() });
        }
        for (index, &value) in x.iter().enumerate() {
            if !value.is_finite() || value.abs() > PI + RANGE_TOL {
                return Err(Error::FeatureOutOfRange { index, value });
            }
        }
        Ok(())
    }

    pub fn template(&self) -> Vec<TemplateOp> {
        match self.kind {
            FeatureMapKind::Bloch => vec![
                TemplateOp::Rotation { axis: Axis::Y, qubit: 0, angle: Angle::Feature(0) },
                TemplateOp::Rotation { axis: Axis::Z, qubit: 0, angle: Angle::Feature(1) },
            ],
            FeatureMapKind::Zz => {
                let n = self.n;
                let mut ops = Vec::new();
                for _ in 0..self.reps {
                    ops.extend((0..n).map(|q| TemplateOp::Fixed(Gate::H(q))));
                    ops.extend((0..n).map(|q| TemplateOp::Rotation {
                        axis: Axis::Z,
                        qubit: q,
                        angle: Angle::Double(q),
                    }));
                    for q in 0..n - 1 {
                        ops.push(TemplateOp::Fixed(Gate::Cnot { control: q, target: q + 1 }));
                        ops.push(TemplateOp::Rotation {
                            axis: Axis::Z,
                            qubit: q + 1,
                            angle: Angle::Pair(q, q + 1),
                        });
                        ops.push(TemplateOp::Fixed(Gate::Cnot { control: q, target: q + 1 }));
                    }
                }
                ops
            }
        }
    }

    pub fn rotation_count(&self) -> usize {
        self.template().iter().filter(|op| matches!(op, TemplateOp::Rotation { .. })).count()
    }

    /// Gates of U_phi(x) acting on `qubits` (data-local qubit `k` -> `qubits[k]`).
    pub fn gates(&self, x: &[f64], qubits: &[usize]) -> Result<Vec<Gate>> {
        self.check_features(x)?;
        Ok(self
            .template()
            .into_iter()
            .map(|op| match op {
                TemplateOp::Fixed(g) => g.remap(qubits),
                TemplateOp::Rotation { axis, qubit, angle } => {
                    Gate::rotation(axis, qubits[qubit], angle.eval(x))
                }
            })
            .collect())
    }

    pub fn circuit(&self, x: &[f64]) -> Result<Circuit> {
        let mut circ = Circuit::with_registers(&[("x", self.n)])?;
        let qubits: Vec<usize> = (0..self.n).collect();
        circ.extend(self.gates(x, &qubits)?)?;
        Ok(circ)
    }

    pub fn state(&self, x: &[f64]) -> Result<StateVector> {
        self.circuit(x)?.run_from_zero()
    }

    /// k(x, z) = |<phi(x)|phi(z)>|^2
    pub fn kernel(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        self.state(x)?.fidelity(&self.state(z)?)
    }
}

pub fn bloch_feature_map(x0: f64, x1: f64) -> Result<Circuit> {
    FeatureMapSpec::bloch().circuit(&[x0, x1])
}

pub fn zz_feature_map(x: &[f64], reps: usize) -> Result<Circuit> {
    FeatureMapSpec::zz(x.len(), reps)?.circuit(x)
}
