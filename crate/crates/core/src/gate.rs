//! Gate set over which circuits are built and simulated.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, C64};

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    X,
    Sx,
    Cnot,
    Cz,
    Swap,
    Cswap,
    Diagonal,
    Unitary,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Sx => "SX",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Cswap => "CSWAP",
            GateKind::Diagonal => "DIAGONAL",
            GateKind::Unitary => "UNITARY",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A gate acting on explicit qubit indices.
///
/// `Diagonal` entries are indexed little-endian over `qubits`: bit `k` of the
/// entry index is the value of `qubits[k]`. `Unitary` is an arbitrary
/// single-qubit operator, produced only by multiplexer synthesis.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Ry { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    H(usize),
    X(usize),
    Sx(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
    Swap(usize, usize),
    Cswap { control: usize, a: usize, b: usize },
    Diagonal { qubits: Vec<usize>, entries: Vec<C64> },
    Unitary { qubit: usize, matrix: Mat2 },
}

impl Gate {
    pub fn rotation(axis: Axis, qubit: usize, theta: f64) -> Gate {
        match axis {
            Axis::X => Gate::Rx { qubit, theta },
            Axis::Y => Gate::Ry { qubit, theta },
            Axis::Z => Gate::Rz { qubit, theta },
        }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Sx(_) => GateKind::Sx,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz(..) => GateKind::Cz,
            Gate::Swap(..) => GateKind::Swap,
            Gate::Cswap { .. } => GateKind::Cswap,
            Gate::Diagonal { .. } => GateKind::Diagonal,
            Gate::Unitary { .. } => GateKind::Unitary,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                vec![*qubit]
            }
            Gate::H(q) | Gate::X(q) | Gate::Sx(q) => vec![*q],
            Gate::Unitary { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::Cswap { control, a, b } => vec![*control, *a, *b],
            Gate::Diagonal { qubits, .. } => qubits.clone(),
        }
    }

    /// Rotation angle for RX/RY/RZ.
    pub fn parameter(&self) -> Option<f64> {
        match self {
            Gate::Rx { theta, .. } | Gate::Ry { theta, .. } | Gate::Rz { theta, .. } => {
                Some(*theta)
            }
            _ => None,
        }
    }

    /// Matrix of a one-qubit gate.
    pub fn matrix(&self) -> Option<Mat2> {
        match self {
            Gate::Rx { theta, .. } => Some(linalg::rx(*theta)),
            Gate::Ry { theta, .. } => Some(linalg::ry(*theta)),
            Gate::Rz { theta, .. } => Some(linalg::rz(*theta)),
            Gate::H(_) => Some(linalg::hadamard()),
            Gate::X(_) => Some(linalg::pauli_x()),
            Gate::Sx(_) => Some(linalg::sqrt_x()),
            Gate::Unitary { matrix, .. } => Some(*matrix),
            _ => None,
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Rx { qubit, theta } => Gate::Rx { qubit: *qubit, theta: -theta },
            Gate::Ry { qubit, theta } => Gate::Ry { qubit: *qubit, theta: -theta },
            Gate::Rz { qubit, theta } => Gate::Rz { qubit: *qubit, theta: -theta },
            Gate::Sx(q) => Gate::Unitary {
                qubit: *q,
                matrix: linalg::adjoint(&linalg::sqrt_x()),
            },
            Gate::Unitary { qubit, matrix } => Gate::Unitary {
                qubit: *qubit,
                matrix: linalg::adjoint(matrix),
            },
            Gate::Diagonal { qubits, entries } => Gate::Diagonal {
                qubits: qubits.clone(),
                entries: entries.iter().map(|e| e.conj()).collect(),
            },
            g => g.clone(),
        }
    }

    /// Relabel qubits: qubit `q` becomes `map[q]`.
    pub fn remap(&self, map: &[usize]) -> Gate {
        let m = |q: &usize| map[*q];
        match self {
            Gate::Rx { qubit, theta } => Gate::Rx { qubit: m(qubit), theta: *theta },
            Gate::Ry { qubit, theta } => Gate::Ry { qubit: m(qubit), theta: *theta },
            Gate::Rz { qubit, theta } => Gate::Rz { qubit: m(qubit), theta: *theta },
            Gate::H(q) => Gate::H(m(q)),
            Gate::X(q) => Gate::X(m(q)),
            Gate::Sx(q) => Gate::Sx(m(q)),
            Gate::Unitary { qubit, matrix } => Gate::Unitary { qubit: m(qubit), matrix: *matrix },
            Gate::Cnot { control, target } => Gate::Cnot { control: m(control), target: m(target) },
            Gate::Cz(a, b) => Gate::Cz(m(a), m(b)),
            Gate::Swap(a, b) => Gate::Swap(m(a), m(b)),
            Gate::Cswap { control, a, b } => Gate::Cswap { control: m(control), a: m(a), b: m(b) },
            Gate::Diagonal { qubits, entries } => Gate::Diagonal {
                qubits: qubits.iter().map(m).collect(),
                entries: entries.clone(),
            },
        }
    }

    /// Check qubit bounds, distinctness, and unitarity of explicit operators.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for (k, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
            if qubits[..k].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        match self {
            Gate::Diagonal { qubits, entries } => {
                if entries.len() != 1usize << qubits.len() {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << qubits.len(),
                        found: entries.len(),
                    });
                }
                if let Some(e) = entries.iter().find(|e| (e.norm() - 1.0).abs() > UNITARY_TOL) {
                    return Err(Error::NonUnitary(format!("diagonal entry of modulus {}", e.norm())));
                }
            }
            Gate::Unitary { matrix, .. } if !linalg::is_unitary(matrix, UNITARY_TOL) => {
                return Err(Error::NonUnitary("single-qubit matrix".into()));
            }
            g => {
                if let Some(t) = g.parameter() {
                    if !t.is_finite() {
                        return Err(Error::InvalidInput(format!("non-finite angle {t}")));
                    }
                }
            }
        }
        Ok(())
    }
}
