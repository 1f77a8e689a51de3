//! Encodings of the chain Hamiltonian `H = −(|0⟩⟨1| ⊗ B + |1⟩⟨0| ⊗ B†)` and
//! of the shifted operator `Ĥ = (H/α_H + I)/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::block_encoding::{tensor, BlockEncoding};
use crate::circuit::{Circuit, Gate, Polarity};
use crate::dense::{CMatrix, RMatrix};
use crate::error::Result;

pub const HAMILTONIAN_LABEL: &str = "U_H";
pub const SHIFTED_LABEL: &str = "U_Hhat";

#[derive(Debug, Clone)]
pub struct HamiltonianEncoding {
    /// `α_H = 2α_B`, `a_H = a_B + 2`, signal = selector wire + index register.
    pub be: BlockEncoding,
    /// Hermitian by construction (sum of an encoding and its adjoint).
    pub hermitian: bool,
}

#[derive(Debug, Clone)]
pub struct ShiftedEncoding {
    /// `α = 1`, `a = a_H + 1`.
    pub be: BlockEncoding,
}

/// (1, 1, 0) encoding of `|0⟩⟨1|` on `[flag][selector]`: X on the selector,
/// then flag the states that started in |0⟩.
fn lowering_encoding() -> BlockEncoding {
    let mut c = Circuit::new(2, "U01");
    c.push(Gate::x(1)).expect("in range");
    c.push(Gate::mcx(&[1], 0)).expect("in range");
    BlockEncoding::new(c, 1.0, 1, 0.0).expect("valid")
}

/// Builds `U_H` from an encoding of `B`.
///
/// Layout `[lcu][flag][B ancillas][selector][index]`. The LCU wire selects
/// `|0⟩⟨1| ⊗ B` or its adjoint; Ry(2π) contributes the overall −1.
pub fn be_hamiltonian(b: &BlockEncoding) -> Result<HamiltonianEncoding> {
    let upper = tensor(&lowering_encoding(), b).with_label("U01B");
    let lower = upper.dagger_encoding().with_label("U10B");
    let width = upper.width() + 1;
    let map: Vec<usize> = (1..width).collect();
    let mut c = Circuit::new(width, HAMILTONIAN_LABEL);
    c.push(Gate::h(0))?;
    c.push(Gate::x(0))?;
    for (i, enc) in [&upper, &lower].into_iter().enumerate() {
        if i == 1 {
            c.push(Gate::x(0))?;
        }
        let mut term = Circuit::new(width, enc.label());
        term.append_call(&enc.circuit, &map)?;
        c.append(&term.add_control(0, Polarity::Closed)?)?;
    }
    c.push(Gate::h(0))?;
    c.push(Gate::ry(0, 2.0 * PI))?;
    let be = BlockEncoding::new(c, 2.0 * b.alpha, b.ancillas + 2, 2.0 * b.epsilon)?;
    Ok(HamiltonianEncoding { be, hermitian: true })
}

/// Builds `Ĥ = (H/α_H + I)/2` as an equal-weight LCU of the identity and `U_H`.
pub fn be_shifted(h: &HamiltonianEncoding) -> Result<ShiftedEncoding> {
    let width = h.be.width() + 1;
    let map: Vec<usize> = (1..width).collect();
    let mut term = Circuit::new(width, HAMILTONIAN_LABEL);
    term.append_call(&h.be.circuit, &map)?;
    let mut c = Circuit::new(width, SHIFTED_LABEL);
    c.push(Gate::h(0))?;
    c.append(&term.add_control(0, Polarity::Closed)?)?;
    c.push(Gate::h(0))?;
    let be = BlockEncoding::new(c, 1.0, h.be.ancillas + 1, h.be.epsilon / (2.0 * h.be.alpha))?;
    Ok(ShiftedEncoding { be })
}

/// Dense `−[[0, B], [Bᵀ, 0]]`.
pub fn hamiltonian_matrix(b: &RMatrix) -> CMatrix {
    let n = b.nrows();
    CMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let v = match (r < n, c < n) {
            (true, false) => -b[(r, c - n)],
            (false, true) => -b[(c, r - n)],
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    })
}

/// Dense `(H/α_H + I)/2`.
pub fn shifted_matrix(h: &CMatrix, alpha_h: f64) -> CMatrix {
    let n = h.nrows();
    (h / Complex64::new(alpha_h, 0.0) + CMatrix::identity(n, n)) * Complex64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{hermitian_eigenvalues, hermiticity_defect, to_complex};
    use crate::incidence::{be_b, be_uniform_closed};
    use crate::oscillator::{build_matrices, Boundary, OscillatorSystem};

    #[test]
    fn lowering_block() {
        let block = lowering_encoding().block();
        assert_eq!(block, to_complex(&RMatrix::from_row_slice(2, 2, &[0., 1., 0., 0.])));
    }

    #[test]
    fn uniform_closed_four() {
        let sys = OscillatorSystem::uniform(4, Boundary::Closed).unwrap();
        let h = be_hamiltonian(&be_uniform_closed(4).unwrap()).unwrap();
        assert_eq!((h.be.alpha, h.be.ancillas), (4.0, 3));
        let target = hamiltonian_matrix(&build_matrices(&sys).b);
        assert!(h.be.verify(&target).unwrap() < 1e-10);
        assert!(hermiticity_defect(&h.be.block()) < 1e-10);
        let eig = hermitian_eigenvalues(&target);
        for (lo, hi) in eig.iter().zip(eig.iter().rev()) {
            assert!((lo + hi).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_b_gives_zero_block() {
        let mut c = Circuit::new(2, "zero");
        c.push(Gate::x(0)).unwrap();
        let zero = BlockEncoding::new(c, 1.0, 1, 0.0).unwrap();
        let h = be_hamiltonian(&zero).unwrap();
        assert!(h.be.block().norm() < 1e-14);
        let shifted = be_shifted(&h).unwrap();
        assert!(shifted.be.verify(&(CMatrix::identity(4, 4) * Complex64::new(0.5, 0.0))).unwrap() < 1e-14);
    }

    #[test]
    fn shifted_spectrum_in_unit_interval() {
        let sys = OscillatorSystem::uniform(4, Boundary::Closed).unwrap();
        let h = be_hamiltonian(&be_b(&sys).unwrap()).unwrap();
        let shifted = be_shifted(&h).unwrap();
        let target = shifted_matrix(&hamiltonian_matrix(&build_matrices(&sys).b), h.be.alpha);
        assert!(shifted.be.verify(&target).unwrap() < 1e-10);
        let eig = hermitian_eigenvalues(&shifted.be.block());
        assert!(eig.iter().all(|&l| (-1e-10..=1.0 + 1e-10).contains(&l)));
    }
}
