//! Block encodings and their composition rules.
//!
//! A [`BlockEncoding`] places its `ancillas` on the top wires and its
//! `signal` register below them; the encoded matrix is
//! `alpha · (⟨0^a| ⊗ I) U (|0^a⟩ ⊗ I)` up to `epsilon`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, Polarity};
use crate::dense::{spectral_norm, CMatrix};
use crate::error::{Error, Result};
use crate::statevector::{extract_block, StateVector};

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub circuit: Circuit,
    pub alpha: f64,
    pub ancillas: usize,
    pub epsilon: f64,
    pub signal: usize,
}

impl BlockEncoding {
    pub fn new(circuit: Circuit, alpha: f64, ancillas: usize, epsilon: f64) -> Result<Self> {
        if ancillas > circuit.width {
            return Err(Error::WidthMismatch { expected: circuit.width, got: ancillas });
        }
        let signal = circuit.width - ancillas;
        Ok(BlockEncoding { circuit, alpha, ancillas, epsilon, signal })
    }

    /// A unitary circuit viewed as a (1, 0, 0) encoding of itself.
    pub fn unitary(circuit: Circuit) -> Self {
        let signal = circuit.width;
        BlockEncoding { circuit, alpha: 1.0, ancillas: 0, epsilon: 0.0, signal }
    }

    /// (1, 0, 0) encoding of the identity on `signal` qubits.
    pub fn identity(signal: usize) -> Self {
        Self::unitary(Circuit::new(signal, "I"))
    }

    pub fn width(&self) -> usize {
        self.circuit.width
    }

    pub fn label(&self) -> &str {
        &self.circuit.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.circuit.label = label.into();
        self
    }

    /// Encoding of the adjoint: the daggered circuit with the same bookkeeping.
    pub fn dagger_encoding(&self) -> BlockEncoding {
        BlockEncoding { circuit: self.circuit.dagger(), ..self.clone() }
    }

    /// The raw block `(⟨0^a| ⊗ I) U (|0^a⟩ ⊗ I)`.
    pub fn block(&self) -> CMatrix {
        extract_block(&self.circuit, self.ancillas)
    }

    /// The block multiplied by `alpha`.
    pub fn encoded_matrix(&self) -> CMatrix {
        self.block() * Complex64::new(self.alpha, 0.0)
    }

    /// `‖target − alpha·block‖₂`.
    pub fn verify(&self, target: &CMatrix) -> Result<f64> {
        let dim = 1 << self.signal;
        if target.nrows() != dim || target.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, rows: target.nrows(), cols: target.ncols() });
        }
        Ok(spectral_norm(&(target - self.encoded_matrix())))
    }
}

/// Coefficient-preparation circuits `P_b` (left) and `Q_b` (right).
///
/// With `P_b|0⟩ = Σ c_j|j⟩` and `Q_b|0⟩ = Σ d_j|j⟩`, the pair prepares the
/// weights `β·c_j*·d_j`.
#[derive(Debug, Clone)]
pub struct StatePrepPair {
    pub prep_left: Circuit,
    pub prep_right: Circuit,
    pub beta: f64,
    pub qubits: usize,
    pub epsilon: f64,
}

impl StatePrepPair {
    /// Hadamards on every selection qubit for both sides: equal weights `β/2^b`.
    pub fn hadamard(qubits: usize, beta: f64) -> Self {
        let mut c = Circuit::new(qubits, "prep");
        for q in 0..qubits {
            c.push(Gate::h(q)).expect("in range");
        }
        StatePrepPair { prep_left: c.clone(), prep_right: c, beta, qubits, epsilon: 0.0 }
    }

    /// Ry binary tree preparing `√(w_j/Σw)` on both sides, `β = Σw`.
    pub fn for_weights(weights: &[f64]) -> Result<Self> {
        let qubits = selection_qubits(weights.len());
        let mut amplitudes = vec![0.0; 1 << qubits];
        let beta: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || beta <= 0.0 {
            return Err(Error::PreparationMismatch(f64::NAN));
        }
        for (a, w) in amplitudes.iter_mut().zip(weights) {
            *a = (w / beta).sqrt();
        }
        let c = real_amplitude_tree(&amplitudes, "prep")?;
        Ok(StatePrepPair { prep_left: c.clone(), prep_right: c, beta, qubits, epsilon: 0.0 })
    }

    /// `Σ_j |β·c_j*·d_j − w_j|` over the selection register.
    pub fn deviation(&self, weights: &[f64]) -> f64 {
        let mut left = StateVector::zero(self.qubits);
        left.apply(&self.prep_left).expect("prep width");
        let mut right = StateVector::zero(self.qubits);
        right.apply(&self.prep_right).expect("prep width");
        left.amplitudes()
            .iter()
            .zip(right.amplitudes())
            .enumerate()
            .map(|(j, (c, d))| {
                let w = weights.get(j).copied().unwrap_or(0.0);
                (c.conj() * d * self.beta - w).norm()
            })
            .sum()
    }
}

/// Smallest `b` with `2^b ≥ terms` (at least one qubit).
pub fn selection_qubits(terms: usize) -> usize {
    let mut b = 1;
    while (1 << b) < terms {
        b += 1;
    }
    b
}

/// Prepares nonnegative real amplitudes (unit norm) with a tree of
/// bitstring-controlled Ry rotations.
pub fn real_amplitude_tree(amplitudes: &[f64], label: &str) -> Result<Circuit> {
    let n = amplitudes.len().trailing_zeros() as usize;
    let mut c = Circuit::new(n, label);
    for level in 0..n {
        let block = 1 << (n - level);
        for prefix in 0..(1 << level) {
            let chunk = &amplitudes[prefix * block..(prefix + 1) * block];
            let (lo, hi) = chunk.split_at(block / 2);
            let n_lo: f64 = lo.iter().map(|x| x * x).sum::<f64>();
            let n_hi: f64 = hi.iter().map(|x| x * x).sum::<f64>();
            if n_hi == 0.0 {
                continue;
            }
            let theta = 2.0 * n_hi.sqrt().atan2(n_lo.sqrt());
            let gate = Gate::ry(level, theta).with_controls(bitstring_controls(prefix, 0, level));
            c.push(gate)?;
        }
    }
    Ok(c)
}

/// Controls on wires `first..first+len` matching the big-endian `value`.
pub fn bitstring_controls(value: usize, first: usize, len: usize) -> Vec<crate::circuit::Control> {
    (0..len)
        .map(|i| {
            let on = (value >> (len - 1 - i)) & 1 == 1;
            crate::circuit::Control {
                qubit: first + i,
                polarity: if on { Polarity::Closed } else { Polarity::Open },
            }
        })
        .collect()
}

/// Encoding of `A ⊗ B`.
///
/// The output layout is `[anc A][anc B][signal A][signal B]`; a SWAP network
/// brings it to the juxtaposed order `[anc A][signal A][anc B][signal B]`
/// around the two circuits and back.
pub fn tensor(a: &BlockEncoding, b: &BlockEncoding) -> BlockEncoding {
    let (na, nb, sa, sb) = (a.ancillas, b.ancillas, a.signal, b.signal);
    let width = na + nb + sa + sb;
    let want: Vec<usize> = (0..na)
        .chain(na + nb..na + nb + sa)
        .chain(na..na + nb)
        .chain(na + nb + sa..width)
        .collect();
    let mut current: Vec<usize> = (0..width).collect();
    let mut swaps = Vec::new();
    for p in 0..width {
        if current[p] != want[p] {
            let q = (p + 1..width).find(|&q| current[q] == want[p]).expect("permutation");
            current.swap(p, q);
            swaps.push((p, q));
        }
    }
    let mut c = Circuit::new(width, format!("{}⊗{}", a.label(), b.label()));
    for &(p, q) in &swaps {
        c.push(Gate::swap(p, q)).expect("in range");
    }
    let map_a: Vec<usize> = (0..na + sa).collect();
    let map_b: Vec<usize> = (na + sa..width).collect();
    c.append_call(&a.circuit, &map_a).expect("in range");
    c.append_call(&b.circuit, &map_b).expect("in range");
    for &(p, q) in swaps.iter().rev() {
        c.push(Gate::swap(p, q)).expect("in range");
    }
    BlockEncoding {
        circuit: c,
        alpha: a.alpha * b.alpha,
        ancillas: na + nb,
        epsilon: a.alpha * b.epsilon + b.alpha * a.epsilon + a.epsilon * b.epsilon,
        signal: sa + sb,
    }
}

/// Encoding of `A·B` with layout `[anc A][anc B][signal]`.
pub fn product(a: &BlockEncoding, b: &BlockEncoding) -> Result<BlockEncoding> {
    if a.signal != b.signal {
        return Err(Error::WidthMismatch { expected: a.signal, got: b.signal });
    }
    let (na, nb, s) = (a.ancillas, b.ancillas, a.signal);
    let mut c = Circuit::new(na + nb + s, format!("{}·{}", a.label(), b.label()));
    let map_b: Vec<usize> = (na..na + nb + s).collect();
    let map_a: Vec<usize> = (0..na).chain(na + nb..na + nb + s).collect();
    c.append_call(&b.circuit, &map_b)?;
    c.append_call(&a.circuit, &map_a)?;
    Ok(BlockEncoding {
        circuit: c,
        alpha: a.alpha * b.alpha,
        ancillas: na + nb,
        epsilon: a.alpha * b.epsilon + b.alpha * a.epsilon,
        signal: s,
    })
}

/// Encoding of `Σ γ_j A_j`.
///
/// `prep` must prepare the effective weights `|γ_j|·α_j`; negative
/// coefficients are absorbed as an Rz(2π) (a factor −1) inside the selected
/// circuit. Layout: `[selection b][shared ancillas][signal]`.
pub fn lcu(coeffs: &[f64], encodings: &[BlockEncoding], prep: &StatePrepPair) -> Result<BlockEncoding> {
    let s = encodings.first().map_or(0, |e| e.signal);
    if let Some(bad) = encodings.iter().find(|e| e.signal != s) {
        return Err(Error::WidthMismatch { expected: s, got: bad.signal });
    }
    if coeffs.len() != encodings.len() {
        return Err(Error::WidthMismatch { expected: encodings.len(), got: coeffs.len() });
    }
    let b = prep.qubits;
    if (1 << b) < encodings.len() {
        return Err(Error::SelectionTooSmall { terms: encodings.len(), capacity: 1 << b });
    }
    let weights: Vec<f64> = coeffs.iter().zip(encodings).map(|(g, e)| g.abs() * e.alpha).collect();
    let deviation = prep.deviation(&weights);
    if deviation > prep.epsilon + 1e-9 {
        return Err(Error::PreparationMismatch(deviation));
    }
    let shared = encodings.iter().map(|e| e.ancillas).max().unwrap_or(0);
    let width = b + shared + s;
    let mut c = Circuit::new(width, "lcu");
    let prep_map: Vec<usize> = (0..b).collect();
    c.append_mapped(&prep.prep_right, &prep_map)?;
    for (j, (gamma, enc)) in coeffs.iter().zip(encodings).enumerate() {
        let mut term = Circuit::new(width, enc.label());
        let map: Vec<usize> = (b..b + enc.ancillas).chain(b + shared..width).collect();
        term.append_call(&enc.circuit, &map)?;
        if *gamma < 0.0 {
            term.push(Gate::rz(b + shared, 2.0 * PI))?;
        }
        for ctrl in bitstring_controls(j, 0, b) {
            term = term.add_control(ctrl.qubit, ctrl.polarity)?;
        }
        c.append(&term)?;
    }
    c.append_mapped(&prep.prep_left.dagger(), &prep_map)?;
    let epsilon = coeffs.iter().zip(encodings).map(|(g, e)| g.abs() * e.epsilon).sum::<f64>() + prep.epsilon;
    Ok(BlockEncoding { circuit: c, alpha: prep.beta, ancillas: b + shared, epsilon, signal: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{kron, to_complex, RMatrix};

    fn x_encoding() -> BlockEncoding {
        let mut c = Circuit::new(1, "X");
        c.push(Gate::x(0)).unwrap();
        BlockEncoding::unitary(c)
    }

    fn pauli_x() -> CMatrix {
        to_complex(&RMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]))
    }

    /// (2, 1, 0) encoding of I − L_2 = [[1,−1],[−1,1]] built by hand.
    fn closed_pair() -> BlockEncoding {
        let mut c = Circuit::new(2, "Bc2");
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::x(1).with_control(crate::circuit::Control::closed(0))).unwrap();
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::x(0)).unwrap();
        BlockEncoding::new(c, 2.0, 1, 0.0).unwrap()
    }

    fn closed_pair_matrix() -> CMatrix {
        to_complex(&RMatrix::from_row_slice(2, 2, &[1., -1., -1., 1.]))
    }

    #[test]
    fn trivial_encoding_verifies() {
        assert_eq!(x_encoding().verify(&pauli_x()).unwrap(), 0.0);
    }

    #[test]
    fn verify_rejects_wrong_dimension() {
        let m = CMatrix::identity(4, 4);
        assert!(matches!(x_encoding().verify(&m), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tensor_of_paulis_needs_no_swaps() {
        let t = tensor(&x_encoding(), &x_encoding());
        assert_eq!(t.ancillas, 0);
        assert!(t.circuit.gates.iter().all(|g| g.kind != crate::circuit::GateKind::Swap));
        assert!(t.verify(&kron(&pauli_x(), &pauli_x())).unwrap() < 1e-14);
    }

    #[test]
    fn tensor_of_closed_pairs() {
        let t = tensor(&closed_pair(), &closed_pair());
        assert_eq!((t.alpha, t.ancillas), (4.0, 2));
        let target = kron(&closed_pair_matrix(), &closed_pair_matrix());
        assert!(t.verify(&target).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_error_formula() {
        let mut a = closed_pair();
        a.epsilon = 0.1;
        let mut b = closed_pair();
        b.alpha = 3.0;
        b.epsilon = 0.2;
        let t = tensor(&a, &b);
        assert!((t.epsilon - 0.72).abs() < 1e-12);
    }

    #[test]
    fn product_with_identity_is_unchanged() {
        let p = product(&BlockEncoding::identity(1), &closed_pair()).unwrap();
        assert!(p.verify(&closed_pair_matrix()).unwrap() < 1e-12);
        let mut a = closed_pair();
        let mut b = closed_pair();
        a.alpha = 2.0;
        b.alpha = 3.0;
        assert_eq!(product(&a, &b).unwrap().alpha, 6.0);
    }

    #[test]
    fn product_rejects_signal_mismatch() {
        let t = tensor(&x_encoding(), &x_encoding());
        assert!(product(&t, &x_encoding()).is_err());
    }

    #[test]
    fn lcu_of_identities() {
        let prep = StatePrepPair::hadamard(1, 1.0);
        let ids = [BlockEncoding::identity(2), BlockEncoding::identity(2)];
        let out = lcu(&[0.5, 0.5], &ids, &prep).unwrap();
        assert_eq!(out.alpha, 1.0);
        assert!(out.verify(&CMatrix::identity(4, 4)).unwrap() < 1e-14);
    }

    #[test]
    fn lcu_absorbs_negative_coefficient() {
        // I − X = [[1,−1],[−1,1]]
        let prep = StatePrepPair::hadamard(1, 2.0);
        let out = lcu(&[1.0, -1.0], &[BlockEncoding::identity(1), x_encoding()], &prep).unwrap();
        assert_eq!(out.alpha, 2.0);
        assert!(out.verify(&closed_pair_matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn lcu_with_weighted_tree() {
        // 0.2 I + 0.5 X − 0.3 Z using a 2-qubit Ry tree.
        let mut zc = Circuit::new(1, "Z");
        zc.push(Gate::z(0)).unwrap();
        let encs = [BlockEncoding::identity(1), x_encoding(), BlockEncoding::unitary(zc)];
        let coeffs = [0.2, 0.5, -0.3];
        let prep = StatePrepPair::for_weights(&[0.2, 0.5, 0.3]).unwrap();
        let out = lcu(&coeffs, &encs, &prep).unwrap();
        let target = to_complex(&RMatrix::from_row_slice(2, 2, &[-0.1, 0.5, 0.5, 0.5]));
        assert!((out.alpha - 1.0).abs() < 1e-14);
        assert!(out.verify(&target).unwrap() < 1e-12);
    }

    #[test]
    fn lcu_rejects_small_selection_register() {
        let prep = StatePrepPair::hadamard(1, 3.0);
        let ids = vec![BlockEncoding::identity(1); 3];
        assert!(matches!(lcu(&[1.0; 3], &ids, &prep), Err(Error::SelectionTooSmall { .. })));
    }

    #[test]
    fn lcu_rejects_inconsistent_preparation() {
        let prep = StatePrepPair::hadamard(1, 1.0);
        let ids = [BlockEncoding::identity(1), BlockEncoding::identity(1)];
        assert!(matches!(lcu(&[1.0, 3.0], &ids, &prep), Err(Error::PreparationMismatch(_))));
    }

    #[test]
    fn amplitude_tree_prepares_target() {
        let amps = [0.1_f64, 0.7, 0.0, 0.2];
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let unit: Vec<f64> = amps.iter().map(|a| a / norm).collect();
        let c = real_amplitude_tree(&unit, "t").unwrap();
        let mut s = StateVector::zero(2);
        s.apply(&c).unwrap();
        for (got, want) in s.amplitudes().iter().zip(&unit) {
            assert!((got - Complex64::new(*want, 0.0)).norm() < 1e-14);
        }
    }
}
