//! Rewriting rules onto the {RX, RY, RZ, CNOT} basis.
//!
//! All rules hold up to global phase:
//! - H = RY(pi/2) . RZ(pi), X = RX(pi), SX = RX(pi/2)
//! - CZ(a, b) = H_b CNOT(a, b) H_b
//! - SWAP = three alternating CNOTs
//! - CSWAP(c; a, b) = CNOT(b, a) . Toffoli(c, a; b) . CNOT(b, a), Toffoli in
//!   the standard six-CNOT form with T = RZ(pi/4)
//! - one-qubit unitaries via ZYZ Euler angles
//! - diagonals recursively as a Z-multiplexer on the top qubit plus a
//!   diagonal on the rest

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::gate::Gate;
use crate::linalg::{Mat2, C64};

const SKIP_TOL: f64 = 1e-12;

pub fn decompose_gate(gate: &Gate) -> Vec<Gate> {
    let mut out = Vec::new();
    emit(gate, &mut out);
    out
}

fn cx(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

fn h(q: usize, out: &mut Vec<Gate>) {
    out.push(Gate::Rz { qubit: q, theta: PI });
    out.push(Gate::Ry { qubit: q, theta: FRAC_PI_2 });
}

fn t(q: usize, out: &mut Vec<Gate>, sign: f64) {
    out.push(Gate::Rz { qubit: q, theta: sign * FRAC_PI_4 });
}

fn emit(gate: &Gate, out: &mut Vec<Gate>) {
    match gate {
        Gate::Rx { .. } | Gate::Ry { .. } | Gate::Rz { .. } | Gate::Cnot { .. } => {
            out.push(gate.clone())
        }
        Gate::H(q) => h(*q, out),
        Gate::X(q) => out.push(Gate::Rx { qubit: *q, theta: PI }),
        Gate::Sx(q) => out.push(Gate::Rx { qubit: *q, theta: FRAC_PI_2 }),
        Gate::Cz(a, b) => {
            h(*b, out);
            out.push(cx(*a, *b));
            h(*b, out);
        }
        Gate::Swap(a, b) => out.extend([cx(*a, *b), cx(*b, *a), cx(*a, *b)]),
        Gate::Cswap { control, a, b } => {
            out.push(cx(*b, *a));
            toffoli(*control, *a, *b, out);
            out.push(cx(*b, *a));
        }
        Gate::Unitary { qubit, matrix } => zyz(*qubit, matrix, out),
        Gate::Diagonal { qubits, entries } => {
            let phases: Vec<f64> = entries.iter().map(|e| e.arg()).collect();
            diagonal(qubits, phases, out);
        }
    }
}

fn toffoli(c1: usize, c2: usize, target: usize, out: &mut Vec<Gate>) {
    h(target, out);
    out.push(cx(c2, target));
    t(target, out, -1.0);
    out.push(cx(c1, target));
    t(target, out, 1.0);
    out.push(cx(c2, target));
    t(target, out, -1.0);
    out.push(cx(c1, target));
    t(c2, out, 1.0);
    t(target, out, 1.0);
    h(target, out);
    out.push(cx(c1, c2));
    t(c1, out, 1.0);
    t(c2, out, -1.0);
    out.push(cx(c1, c2));
}

/// U = e^{i g} RZ(a) RY(b) RZ(d); emitted in time order RZ(d), RY(b), RZ(a).
fn zyz(q: usize, u: &Mat2, out: &mut Vec<Gate>) {
    let (a, b, d) = zyz_angles(u);
    for (gate, theta) in [
        (Gate::Rz { qubit: q, theta: d }, d),
        (Gate::Ry { qubit: q, theta: b }, b),
        (Gate::Rz { qubit: q, theta: a }, a),
    ] {
        if theta.abs() > SKIP_TOL {
            out.push(gate);
        }
    }
}

pub(crate) fn zyz_angles(u: &Mat2) -> (f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let s = det.sqrt();
    let v00: C64 = u[0][0] / s;
    let v10: C64 = u[1][0] / s;
    let b = 2.0 * v10.norm().atan2(v00.norm());
    if v10.norm() < 1e-12 {
        (-2.0 * v00.arg(), b, 0.0)
    } else if v00.norm() < 1e-12 {
        (2.0 * v10.arg(), b, 0.0)
    } else {
        (v10.arg() - v00.arg(), b, -v10.arg() - v00.arg())
    }
}

/// Diagonal with phases indexed little-endian over `qubits`.
fn diagonal(qubits: &[usize], phases: Vec<f64>, out: &mut Vec<Gate>) {
    let k = qubits.len();
    if k == 0 {
        return;
    }
    let half = 1usize << (k - 1);
    let (lo, hi) = phases.split_at(half);
    let thetas: Vec<f64> = lo.iter().zip(hi).map(|(p0, p1)| p1 - p0).collect();
    let rest: Vec<f64> = lo.iter().zip(hi).map(|(p0, p1)| (p0 + p1) / 2.0).collect();
    ucrz(&thetas, &qubits[..k - 1], qubits[k - 1], out);
    diagonal(&qubits[..k - 1], rest, out);
}

enum Step {
    Rot(f64),
    Cx(usize),
}

/// Z-multiplexer with CNOT entanglers; zero rotations are dropped and the
/// CNOTs they separated are cancelled pairwise.
fn ucrz(thetas: &[f64], controls: &[usize], target: usize, out: &mut Vec<Gate>) {
    if controls.is_empty() {
        if thetas[0].abs() > SKIP_TOL {
            out.push(Gate::Rz { qubit: target, theta: thetas[0] });
        }
        return;
    }
    let m = controls.len();
    let mm = thetas.len();
    let mut steps = Vec::with_capacity(2 * mm);
    for k in 0..mm {
        let g = k ^ (k >> 1);
        let phi = thetas
            .iter()
            .enumerate()
            .map(|(i, th)| if (g & i).count_ones() % 2 == 0 { *th } else { -th })
            .sum::<f64>()
            / mm as f64;
        steps.push(Step::Rot(phi));
        let bit = ((k + 1).trailing_zeros() as usize).min(m - 1);
        steps.push(Step::Cx(controls[bit]));
    }
    let mut pending: Vec<usize> = Vec::new();
    let flush = |pending: &mut Vec<usize>, out: &mut Vec<Gate>| {
        let mut odd: Vec<usize> = Vec::new();
        for &c in pending.iter() {
            if let Some(pos) = odd.iter().position(|&x| x == c) {
                odd.remove(pos);
            } else {
                odd.push(c);
            }
        }
        out.extend(odd.into_iter().map(|c| cx(c, target)));
        pending.clear();
    };
    for step in steps {
        match step {
            Step::Rot(phi) if phi.abs() > SKIP_TOL => {
                flush(&mut pending, out);
                out.push(Gate::Rz { qubit: target, theta: phi });
            }
            Step::Rot(_) => {}
            Step::Cx(c) => pending.push(c),
        }
    }
    flush(&mut pending, out);
}
