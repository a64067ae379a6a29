//! The three measured circuits: loss, decision, and regularization.

use crate::ansatz::AnsatzSpec;
use crate::circuit::Circuit;
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::feature_map::FeatureMapSpec;
use crate::gate::Gate;
use crate::oracle::oracle_gates;

fn check_dims(set: &TrainingSet, ansatz: &AnsatzSpec) -> Result<()> {
    if ansatz.m != set.m() {
        return Err(Error::DimensionMismatch { expected: set.m(), found: ansatz.m });
    }
    Ok(())
}

/// H^m then V(theta) on `qubits`.
fn index_preparation(ansatz: &AnsatzSpec, theta: &[f64], qubits: &[usize]) -> Result<Vec<Gate>> {
    let mut gates: Vec<Gate> = qubits.iter().map(|&q| Gate::H(q)).collect();
    gates.extend(ansatz.gates(theta, qubits)?);
    Ok(gates)
}

/// Ancilla-controlled swap of two equal-width registers between Hadamards;
/// afterwards <Z_anc> = |<u|v>|^2.
pub fn swap_test_gates(ancilla: usize, u: &[usize], v: &[usize]) -> Vec<Gate> {
    let mut gates = vec![Gate::H(ancilla)];
    gates.extend(u.iter().zip(v).map(|(&a, &b)| Gate::Cswap { control: ancilla, a, b }));
    gates.push(Gate::H(ancilla));
    gates
}

/// Registers a(1), i(m), j(m), x0(n), x1(n), y0(1), y1(1).
pub fn build_loss_circuit(
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    theta: &[f64],
) -> Result<Circuit> {
    check_dims(set, ansatz)?;
    let (m, n) = (set.m(), fmap.n);
    let mut circ = Circuit::with_registers(&[
        ("a", 1),
        ("i", m),
        ("j", m),
        ("x0", n),
        ("x1", n),
        ("y0", 1),
        ("y1", 1),
    ])?;
    let a = circ.reg("a")?[0];
    let (i, j) = (circ.reg("i")?, circ.reg("j")?);
    let (x0, x1) = (circ.reg("x0")?, circ.reg("x1")?);
    let (y0, y1) = (circ.reg("y0")?[0], circ.reg("y1")?[0]);
    circ.extend(index_preparation(ansatz, theta, &i)?)?;
    circ.extend(index_preparation(ansatz, theta, &j)?)?;
    circ.extend(oracle_gates(set, fmap, &i, &x0, y0)?)?;
    circ.extend(oracle_gates(set, fmap, &j, &x1, y1)?)?;
    circ.extend(swap_test_gates(a, &x0, &x1))?;
    Ok(circ)
}

/// Registers a(1), i(m), x(n), y(1), xh(n).
pub fn build_decision_circuit(
    xhat: &[f64],
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    theta: &[f64],
) -> Result<Circuit> {
    check_dims(set, ansatz)?;
    let (m, n) = (set.m(), fmap.n);
    let mut circ = Circuit::with_registers(&[("a", 1), ("i", m), ("x", n), ("y", 1), ("xh", n)])?;
    let a = circ.reg("a")?[0];
    let (i, x, xh) = (circ.reg("i")?, circ.reg("x")?, circ.reg("xh")?);
    let y = circ.reg("y")?[0];
    circ.extend(index_preparation(ansatz, theta, &i)?)?;
    circ.extend(oracle_gates(set, fmap, &i, &x, y)?)?;
    circ.extend(fmap.gates(xhat, &xh)?)?;
    circ.extend(swap_test_gates(a, &x, &xh))?;
    Ok(circ)
}

/// Registers i(m), j(m); P(j = 0...0) equals sum_i alpha_i^2.
pub fn build_regularization_circuit(ansatz: &AnsatzSpec, theta: &[f64]) -> Result<Circuit> {
    let m = ansatz.m;
    let mut circ = Circuit::with_registers(&[("i", m), ("j", m)])?;
    let (i, j) = (circ.reg("i")?, circ.reg("j")?);
    circ.extend(index_preparation(ansatz, theta, &i)?)?;
    circ.extend(index_preparation(ansatz, theta, &j)?)?;
    circ.extend(i.iter().zip(&j).map(|(&c, &t)| Gate::Cnot { control: c, target: t }))?;
    Ok(circ)
}
