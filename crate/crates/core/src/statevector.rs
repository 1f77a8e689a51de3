//! Dense statevector simulation.
//!
//! Ancillas are the top wires, so the ancilla-|0…0⟩ subspace is the leading
//! `2^s` amplitudes.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateKind, Polarity};
use crate::dense::{CMatrix, CVector};
use crate::error::{Error, Result};

/// Tolerance for unitarity checks of simulated circuits.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance for exact block-encoding checks.
pub const BLOCK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

/// Result of projecting the ancilla register onto a fixed bitstring.
#[derive(Debug, Clone)]
pub struct AncillaOutcome {
    pub probability: f64,
    pub post_state: StateVector,
}

impl StateVector {
    pub fn zero(width: usize) -> Self {
        Self::basis(width, 0)
    }

    pub fn basis(width: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); 1 << width];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector { width, amplitudes }
    }

    pub fn from_amplitudes(width: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << width {
            return Err(Error::WidthMismatch { expected: 1 << width, got: amplitudes.len() });
        }
        Ok(StateVector { width, amplitudes })
    }

    /// `|0^a⟩ ⊗ signal`.
    pub fn with_ancillas(ancillas: usize, signal: &StateVector) -> Self {
        let mut amplitudes = vec![Complex64::default(); 1 << (ancillas + signal.width)];
        amplitudes[..signal.amplitudes.len()].copy_from_slice(&signal.amplitudes);
        StateVector { width: ancillas + signal.width, amplitudes }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amplitudes)
    }

    /// Applies `circuit` in place.
    pub fn apply(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.width != self.width {
            return Err(Error::WidthMismatch { expected: self.width, got: circuit.width });
        }
        for gate in &circuit.gates {
            apply_gate(&mut self.amplitudes, self.width, gate);
        }
        if circuit.global_phase != 0.0 {
            let phase = Complex64::from_polar(1.0, circuit.global_phase);
            self.amplitudes.iter_mut().for_each(|a| *a *= phase);
        }
        Ok(())
    }

    /// Projects the top `ancillas` wires onto `outcome`.
    pub fn project_ancillas(&self, ancillas: usize, outcome: usize) -> Result<AncillaOutcome> {
        if ancillas > self.width || outcome >= 1 << ancillas {
            return Err(Error::WidthMismatch { expected: self.width, got: ancillas });
        }
        let signal = self.width - ancillas;
        let start = outcome << signal;
        let slice = &self.amplitudes[start..start + (1 << signal)];
        let probability: f64 = slice.iter().map(Complex64::norm_sqr).sum();
        if probability == 0.0 {
            return Err(Error::ZeroProbability { outcome });
        }
        let scale = 1.0 / probability.sqrt();
        let post_state = StateVector {
            width: signal,
            amplitudes: slice.iter().map(|a| a * scale).collect(),
        };
        Ok(AncillaOutcome { probability, post_state })
    }

    /// Writes `index,real,imaginary` rows.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "index,real,imaginary")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{i},{:e},{:e}", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Returns `matrix(circuit)·state`.
pub fn apply(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(circuit)?;
    Ok(out)
}

/// Top-left `2^(width−a)` block of the circuit unitary.
pub fn extract_block(circuit: &Circuit, ancillas: usize) -> CMatrix {
    let signal = circuit.width - ancillas;
    let dim = 1 << signal;
    let columns: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut s = StateVector::basis(circuit.width, j);
            s.apply(circuit).expect("width matches by construction");
            s.amplitudes.truncate(dim);
            s.amplitudes
        })
        .collect();
    CMatrix::from_fn(dim, dim, |r, c| columns[c][r])
}

/// Full unitary of a circuit.
pub fn circuit_matrix(circuit: &Circuit) -> CMatrix {
    extract_block(circuit, 0)
}

fn apply_gate(amps: &mut [Complex64], width: usize, gate: &Gate) {
    let bit = |q: usize| 1usize << (width - 1 - q);
    let mut mask = 0usize;
    let mut value = 0usize;
    for c in &gate.controls {
        mask |= bit(c.qubit);
        if c.polarity == Polarity::Closed {
            value |= bit(c.qubit);
        }
    }
    let fires = |i: usize| i & mask == value;

    if gate.kind == GateKind::Swap {
        let (a, b) = (bit(gate.targets[0]), bit(gate.targets[1]));
        for i in 0..amps.len() {
            if i & a != 0 && i & b == 0 && fires(i) {
                amps.swap(i, i ^ a ^ b);
            }
        }
        return;
    }

    let t = bit(gate.targets[0]);
    let pairs = (0..amps.len()).step_by(2 * t).flat_map(|base| base..base + t).filter(|&i| fires(i));
    match gate.kind {
        GateKind::X => {
            for i in pairs {
                amps.swap(i, i | t);
            }
        }
        GateKind::Z => {
            for i in pairs {
                amps[i | t] = -amps[i | t];
            }
        }
        kind => {
            let [[m00, m01], [m10, m11]] = kind.matrix().expect("single-target kind");
            for i in pairs {
                let j = i | t;
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = m00 * a0 + m01 * a1;
                amps[j] = m10 * a0 + m11 * a1;
            }
        }
    }
}
