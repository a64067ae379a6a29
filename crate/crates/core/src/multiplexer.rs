//! Uniformly controlled (multiplexed) rotations.
//!
//! Rotation angles are mixed with the Gray-code Walsh transform
//! `phi_k = (1/M) sum_i (-1)^{popcount(gray(k) & i)} theta_i` and separated by
//! CZ entanglers. Z anticommutes with both X and Y, so a CZ from the control
//! that flips between `gray(k)` and `gray(k+1)` negates every later rotation
//! on that branch. The final entangler (from the top control) is emitted as a
//! two-qubit DIAGONAL. RZ is handled as `H . mux-RX . H` on the target.

use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Axis, Gate};
use crate::linalg::{cis, C64};

/// Gate sequence applying `R_axis(angles[i])` to `target` whenever the
/// controls hold `i` (bit `k` of `i` is `controls[k]`).
pub fn multiplexed_rotation(angles: &[f64], axis: Axis, controls: &[usize], target: usize) -> Result<Vec<Gate>> {
    let mm = angles.len();
    if !mm.is_power_of_two() || mm != 1usize << controls.len() {
        return Err(Error::NotPowerOfTwo(mm));
    }
    let m = controls.len();
    let rot_axis = if axis == Axis::Z { Axis::X } else { axis };
    let mut gates = Vec::with_capacity(2 * mm + 2);
    if axis == Axis::Z {
        gates.push(Gate::H(target));
    }
    if m == 0 {
        gates.push(Gate::rotation(rot_axis, target, angles[0]));
    } else {
        for (k, phi) in gray_walsh(angles).into_iter().enumerate() {
            gates.push(Gate::rotation(rot_axis, target, phi));
            if k + 1 < mm {
                let bit = (k + 1).trailing_zeros() as usize;
                gates.push(Gate::Cz(controls[bit], target));
            }
        }
        gates.push(Gate::Diagonal {
            qubits: vec![controls[m - 1], target],
            entries: vec![cis(0.0), cis(0.0), cis(0.0), cis(PI)],
        });
    }
    if axis == Axis::Z {
        gates.push(Gate::H(target));
    }
    Ok(gates)
}

/// `phi_k = (1/M) sum_i (-1)^{popcount(gray(k) & i)} theta_i`.
pub fn gray_walsh(angles: &[f64]) -> Vec<f64> {
    let mm = angles.len();
    (0..mm)
        .map(|k| {
            let g = k ^ (k >> 1);
            angles
                .iter()
                .enumerate()
                .map(|(i, th)| if (g & i).count_ones() % 2 == 0 { *th } else { -th })
                .sum::<f64>()
                / mm as f64
        })
        .collect()
}

/// Standalone multiplexer on registers `c` (qubits `0..m`) and `t` (qubit `m`).
pub fn uniformly_controlled_rotation(angles: &[f64], axis: Axis) -> Result<Circuit> {
    if !angles.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(angles.len()));
    }
    let m = angles.len().trailing_zeros() as usize;
    let mut circ = Circuit::with_registers(&[("c", m), ("t", 1)])?;
    let controls: Vec<usize> = (0..m).collect();
    circ.extend(multiplexed_rotation(angles, axis, &controls, m)?)?;
    Ok(circ)
}

/// Entangling two-qubit gates excluding the closing DIAGONAL.
pub fn entangler_count(gates: &[Gate]) -> usize {
    gates
        .iter()
        .filter(|g| matches!(g, Gate::Cnot { .. } | Gate::Cz(..)))
        .count()
}

/// Dense block-diagonal reference `sum_i |i><i| (x) R(angles[i])`, indexed
/// `[row][col]` with the controls on the low bits and the target above them.
pub fn reference_matrix(angles: &[f64], axis: Axis) -> Vec<Vec<C64>> {
    use crate::linalg;
    let mm = angles.len();
    let dim = 2 * mm;
    let mut out = vec![vec![linalg::ZERO; dim]; dim];
    for (i, &th) in angles.iter().enumerate() {
        let r = match axis {
            Axis::X => linalg::rx(th),
            Axis::Y => linalg::ry(th),
            Axis::Z => linalg::rz(th),
        };
        for a in 0..2 {
            for b in 0..2 {
                out[i + a * mm][i + b * mm] = r[a][b];
            }
        }
    }
    out
}
