//! Gate lists over named registers.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::basis;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};
use crate::statevector::{parse_bits, StateVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.range().collect()
    }
}

/// Named, disjoint, contiguous qubit ranges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterMap {
    regs: Vec<Register>,
}

impl RegisterMap {
    pub fn get(&self, name: &str) -> Result<&Register> {
        self.regs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Register> {
        self.regs.iter()
    }

    fn covers(&self, q: usize) -> bool {
        self.regs.iter().any(|r| r.range().contains(&q))
    }

    fn end(&self) -> usize {
        self.regs.iter().map(|r| r.start + r.len).max().unwrap_or(0)
    }
}

/// Probability that register `name` reads `bits` (character `k` is the
/// register's `k`-th qubit).
pub fn projector_probability(
    state: &StateVector,
    registers: &RegisterMap,
    name: &str,
    bits: &str,
) -> Result<f64> {
    let reg = registers.get(name)?;
    let parsed = parse_bits(bits)
        .filter(|b| b.len() == reg.len)
        .ok_or_else(|| Error::Bitstring { bits: bits.to_string(), width: reg.len })?;
    state.probability_of(&reg.qubits(), &parsed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    registers: RegisterMap,
    gates: Vec<Gate>,
}

impl Circuit {
    /// A circuit with a single register `q` spanning all qubits.
    pub fn new(num_qubits: usize) -> Circuit {
        Circuit::with_registers(&[("q", num_qubits)]).expect("single register")
    }

    /// Lay out registers contiguously in the given order.
    pub fn with_registers(layout: &[(&str, usize)]) -> Result<Circuit> {
        let mut c = Circuit { num_qubits: 0, registers: RegisterMap::default(), gates: Vec::new() };
        for &(name, len) in layout {
            c.add_register(name, len)?;
        }
        Ok(c)
    }

    /// Append a register of `len` fresh qubits.
    pub fn add_register(&mut self, name: &str, len: usize) -> Result<Range<usize>> {
        if self.registers.get(name).is_ok() {
            return Err(Error::RegisterCollision(format!("register `{name}` declared twice")));
        }
        let start = self.registers.end();
        self.registers.regs.push(Register { name: name.to_string(), start, len });
        self.num_qubits = self.num_qubits.max(start + len);
        Ok(start..start + len)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn registers(&self) -> &RegisterMap {
        &self.registers
    }

    pub fn reg(&self, name: &str) -> Result<Vec<usize>> {
        Ok(self.registers.get(name)?.qubits())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        if let Some(q) = gate.qubits().into_iter().find(|&q| !self.registers.covers(q)) {
            return Err(Error::UnregisteredQubit(q));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Append `other`, sending its qubit `k` to `map[k]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: other.num_qubits, found: map.len() });
        }
        other.gates.iter().try_for_each(|g| self.push(g.remap(map)))
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn run(&self, initial: &StateVector) -> Result<StateVector> {
        if initial.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: initial.num_qubits() });
        }
        let mut state = initial.clone();
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(state)
    }

    pub fn run_from_zero(&self) -> Result<StateVector> {
        self.run(&StateVector::zero(self.num_qubits)?)
    }

    /// Longest per-qubit dependency chain; every gate occupies all of its
    /// qubits for one layer.
    pub fn depth(&self) -> usize {
        let mut layer = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let d = qs.iter().map(|&q| layer[q]).max().unwrap_or(0) + 1;
            for q in qs {
                layer[q] = d;
            }
            depth = depth.max(d);
        }
        depth
    }

    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.kind()).or_insert(0) += 1;
        }
        counts
    }

    /// Rewrite over {RX, RY, RZ, CNOT}; equal to `self` up to global phase.
    pub fn decomposed(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            gates: self.gates.iter().flat_map(basis::decompose_gate).collect(),
        }
    }
}

pub fn circuit_depth(circuit: &Circuit, decompose_to_basis: bool) -> usize {
    if decompose_to_basis {
        circuit.decomposed().depth()
    } else {
        circuit.depth()
    }
}

pub fn gate_counts(circuit: &Circuit) -> BTreeMap<GateKind, usize> {
    circuit.gate_counts()
}
