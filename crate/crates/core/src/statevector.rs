//! Dense statevector simulation.
//!
//! Amplitudes are little-endian: qubit 0 is the least significant bit of the
//! basis index.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::linalg::{Mat2, C64, ONE, ZERO};
use crate::rng;

/// Practical simulation cap (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::InvalidInput("a state needs at least one qubit".into()));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")));
    }
    Ok(())
}

impl StateVector {
    /// |0...0> on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Wrap raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_width(num_qubits)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!("amplitudes have squared norm {norm}")));
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// <self|other>
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |<self|other>|^2
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Tensor product with `self` on the low qubits and `high` above it.
    pub fn tensor(&self, high: &StateVector) -> Result<StateVector> {
        check_width(self.num_qubits + high.num_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * high.dim());
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| l * h));
        }
        Ok(StateVector { num_qubits: self.num_qubits + high.num_qubits, amps })
    }

    /// Apply `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::Cnot { control, target } => {
                self.apply_controlled(1 << control, *target, &crate::linalg::pauli_x())
            }
            Gate::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Swap(a, b) => self.swap_bits(0, *a, *b),
            Gate::Cswap { control, a, b } => self.swap_bits(1 << control, *a, *b),
            Gate::Diagonal { qubits, entries } => {
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    let sub = qubits
                        .iter()
                        .enumerate()
                        .fold(0usize, |s, (k, &q)| s | (((i >> q) & 1) << k));
                    *amp *= entries[sub];
                }
            }
            g => {
                let m = g.matrix().expect("one-qubit gate");
                self.apply_single(g.qubits()[0], &m);
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, q: usize, m: &Mat2) {
        let stride = 1usize << q;
        for chunk in self.amps.chunks_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn apply_controlled(&mut self, control_mask: usize, q: usize, m: &Mat2) {
        let stride = 1usize << q;
        for i0 in 0..self.amps.len() {
            if i0 & stride != 0 || i0 & control_mask != control_mask {
                continue;
            }
            let i1 = i0 | stride;
            let (x, y) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * x + m[0][1] * y;
            self.amps[i1] = m[1][0] * x + m[1][1] * y;
        }
    }

    fn swap_bits(&mut self, control_mask: usize, a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & control_mask == control_mask && i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    /// <Z_{q1} Z_{q2} ...>; the empty product is 1.
    pub fn expectation_pauli_z(&self, qubits: &[usize]) -> Result<f64> {
        let mask = self.mask(qubits)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if (i & mask).count_ones() % 2 == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    fn mask(&self, qubits: &[usize]) -> Result<usize> {
        let mut mask = 0usize;
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
            }
            mask |= 1 << q;
        }
        Ok(mask)
    }

    /// Marginal distribution over `qubits`; bit `k` of the outcome index is
    /// the value of `qubits[k]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.mask(qubits)?;
        for (k, q) in qubits.iter().enumerate() {
            if qubits[..k].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sub = qubits
                .iter()
                .enumerate()
                .fold(0usize, |s, (k, &q)| s | (((i >> q) & 1) << k));
            out[sub] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Probability that `qubits[k]` reads `bits[k]` for every k.
    pub fn probability_of(&self, qubits: &[usize], bits: &[bool]) -> Result<f64> {
        if bits.len() != qubits.len() {
            return Err(Error::DimensionMismatch { expected: qubits.len(), found: bits.len() });
        }
        let mask = self.mask(qubits)?;
        let want = qubits
            .iter()
            .zip(bits)
            .fold(0usize, |s, (&q, &b)| s | ((b as usize) << q));
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .clamp(0.0, 1.0))
    }

    /// Seeded multinomial sample of the marginal on `qubits`. Histogram keys
    /// list bits in `qubits` order: character `k` is the value of `qubits[k]`.
    pub fn sample_bits(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        self.sample_bits_stream(qubits, shots, seed, 0)
    }

    pub fn sample_bits_stream(
        &self,
        qubits: &[usize],
        shots: u64,
        seed: u64,
        stream: u64,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.marginal(qubits)?;
        let counts = rng::sample_counts(&probs, shots, &mut rng::counter_rng(seed, stream));
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|(_, n)| *n > 0)
            .map(|(k, n)| (bit_key(k, qubits.len()), n))
            .collect())
    }
}

/// Render outcome `index` over `width` bits, character `k` being bit `k`.
pub fn bit_key(index: usize, width: usize) -> String {
    (0..width).map(|k| if (index >> k) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parse a bitstring in the `bit_key` convention.
pub fn parse_bits(bits: &str) -> Option<Vec<bool>> {
    bits.chars()
        .map(|ch| match ch {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}
