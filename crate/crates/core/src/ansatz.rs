//! Hardware-efficient ansatz V(theta) on the index register.
//!
//! Each layer applies RY on every qubit followed by a linear CZ chain. The
//! initial Hadamards that prepare |+...+> belong to circuit assembly.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::linalg::C64;
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    /// Index-register qubits, m = log2 M.
    pub m: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(m: usize, layers: usize) -> Result<AnsatzSpec> {
        if layers == 0 {
            return Err(Error::InvalidInput("the ansatz needs at least one layer".into()));
        }
        Ok(AnsatzSpec { m, layers })
    }

    pub fn num_params(&self) -> usize {
        self.layers * self.m
    }

    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::DimensionMismatch { expected: self.num_params(), found: theta.len() });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite ansatz parameter".into()));
        }
        Ok(())
    }

    /// V(theta) on `qubits` (`qubits.len() == m`).
    pub fn gates(&self, theta: &[f64], qubits: &[usize]) -> Result<Vec<Gate>> {
        self.check_theta(theta)?;
        if qubits.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: qubits.len() });
        }
        let m = self.m;
        let mut gates = Vec::with_capacity(self.layers * (2 * m));
        for layer in 0..self.layers {
            for q in 0..m {
                gates.push(Gate::Ry { qubit: qubits[q], theta: theta[layer * m + q] });
            }
            for q in 0..m.saturating_sub(1) {
                gates.push(Gate::Cz(qubits[q], qubits[q + 1]));
            }
        }
        Ok(gates)
    }

    /// Amplitudes of V(theta)|+...+>; `[1]` when m = 0.
    pub fn index_amplitudes(&self, theta: &[f64]) -> Result<Vec<C64>> {
        self.check_theta(theta)?;
        if self.m == 0 {
            return Ok(vec![C64::new(1.0, 0.0)]);
        }
        let qubits: Vec<usize> = (0..self.m).collect();
        let mut state = StateVector::zero(self.m)?;
        for &q in &qubits {
            state.apply(&Gate::H(q))?;
        }
        for g in self.gates(theta, &qubits)? {
            state.apply(&g)?;
        }
        Ok(state.into_amplitudes())
    }
}

pub fn build_ansatz(spec: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    let mut circ = Circuit::with_registers(&[("i", spec.m)])?;
    let qubits: Vec<usize> = (0..spec.m).collect();
    circ.extend(spec.gates(theta, &qubits)?)?;
    Ok(circ)
}

/// alpha_i(theta) = |<i|V(theta)|+...+>|^2
pub fn alpha_distribution(spec: &AnsatzSpec, theta: &[f64]) -> Result<Vec<f64>> {
    Ok(spec.index_amplitudes(theta)?.iter().map(|a| a.norm_sqr()).collect())
}
