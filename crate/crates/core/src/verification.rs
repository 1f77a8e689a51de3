//! Dense-target checks for every encoding family.

use serde::Serialize;

use crate::block_encoding::BlockEncoding;
use crate::dense::{to_complex, CMatrix, RMatrix};
use crate::error::Result;
use crate::hamiltonian::{be_hamiltonian, be_shifted, hamiltonian_matrix, shifted_matrix};
use crate::incidence::{
    be_b, be_diagonal, be_identity_prime, be_incidence, be_padded, be_shift_prime, be_uniform_closed,
    be_uniform_open, l_shift_circuit, PaddedKind,
};
use crate::oscillator::{build_matrices, rescale, Boundary, OscillatorSystem};

/// Sizes covered by the default suite.
pub const SUITE_SIZES: [usize; 8] = [2, 3, 4, 5, 6, 7, 8, 12];
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub family: String,
    pub n: usize,
    pub boundary: Option<Boundary>,
    pub error: f64,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.error <= VERIFY_TOL
    }
}

/// `pad(L)` for the cyclic shift of length `n` (`wrap`) or its open variant.
pub fn shift_matrix(n: usize, dim: usize, wrap: bool) -> CMatrix {
    let mut m = RMatrix::zeros(dim, dim);
    for j in 0..n {
        if j + 1 < n {
            m[(j + 1, j)] = 1.0;
        } else if wrap {
            m[(0, j)] = 1.0;
        }
    }
    to_complex(&m)
}

/// `pad(I_n)` with an optional zero in the last in-range slot.
pub fn identity_matrix(n: usize, dim: usize, prime: bool) -> CMatrix {
    let mut m = RMatrix::zeros(dim, dim);
    for j in 0..n {
        if !(prime && j + 1 == n) {
            m[(j, j)] = 1.0;
        }
    }
    to_complex(&m)
}

/// Deterministic spread of masses ≥ 1 and springs in (0, 1].
fn weighted_system(n: usize, boundary: Boundary) -> Result<OscillatorSystem> {
    let masses: Vec<f64> = (0..n).map(|j| 1.0 + ((j * 7 + 3) % 5) as f64 * 0.8).collect();
    let count = if boundary == Boundary::Open { n - 1 } else { n };
    let springs: Vec<f64> = (0..count).map(|j| 0.2 + ((j * 5 + 1) % 4) as f64 * 0.25).collect();
    Ok(rescale(&masses, &springs, boundary)?.0)
}

fn record(family: &str, n: usize, boundary: Option<Boundary>, be: &BlockEncoding, target: &CMatrix) -> Result<VerificationRecord> {
    Ok(VerificationRecord { family: family.into(), n, boundary, error: be.verify(target)? })
}

/// Verifies each encoding family at chain length `n`.
pub fn verify_size(n: usize) -> Result<Vec<VerificationRecord>> {
    let dim = n.next_power_of_two();
    let mut out = Vec::new();
    if n.is_power_of_two() {
        let bits = n.trailing_zeros() as usize;
        let shift = BlockEncoding::unitary(l_shift_circuit(bits));
        out.push(record("L_shift", n, None, &shift, &shift_matrix(n, n, true))?);
        let closed = build_matrices(&OscillatorSystem::uniform(n, Boundary::Closed)?).incidence;
        out.push(record("B_c", n, Some(Boundary::Closed), &be_uniform_closed(n)?, &to_complex(&closed))?);
        let open = build_matrices(&OscillatorSystem::uniform(n, Boundary::Open)?).incidence;
        out.push(record("B_o", n, Some(Boundary::Open), &be_uniform_open(n)?, &to_complex(&open))?);
        out.push(record("I_prime", n, None, &be_identity_prime(n)?, &identity_matrix(n, n, true))?);
        out.push(record("L_prime", n, None, &be_shift_prime(n)?, &shift_matrix(n, n, false))?);
    }
    let diag: Vec<f64> = (0..n).map(|j| ((j as f64 + 0.5) * 1.3).sin()).collect();
    let diag_target = CMatrix::from_fn(dim.max(2), dim.max(2), |r, c| {
        let v = if r == c && r < n { diag[r] } else { 0.0 };
        num_complex::Complex64::new(v, 0.0)
    });
    out.push(record("diagonal", n, None, &be_diagonal(&diag)?, &diag_target)?);
    for (kind, name, target) in [
        (PaddedKind::Identity, "pad_I", identity_matrix(n, dim, false)),
        (PaddedKind::IdentityPrime, "pad_I_prime", identity_matrix(n, dim, true)),
        (PaddedKind::Shift, "pad_L", shift_matrix(n, dim, true)),
        (PaddedKind::ShiftPrime, "pad_L_prime", shift_matrix(n, dim, false)),
    ] {
        out.push(record(name, n, None, &be_padded(kind, n)?, &target)?);
    }
    for boundary in [Boundary::Open, Boundary::Closed] {
        let uniform = OscillatorSystem::uniform(n, boundary)?;
        let mats = build_matrices(&uniform);
        out.push(record("Phi", n, Some(boundary), &be_incidence(n, boundary)?, &to_complex(&mats.incidence))?);

        let sys = weighted_system(n, boundary)?;
        let b_mat = build_matrices(&sys).b;
        let b = be_b(&sys)?;
        out.push(record("B_general", n, Some(boundary), &b, &to_complex(&b_mat))?);
        let h = be_hamiltonian(&b)?;
        let h_dense = hamiltonian_matrix(&b_mat);
        out.push(record("U_H", n, Some(boundary), &h.be, &h_dense)?);
        let shifted = be_shifted(&h)?;
        out.push(record("U_Hhat", n, Some(boundary), &shifted.be, &shifted_matrix(&h_dense, h.be.alpha))?);
    }
    Ok(out)
}

pub fn verify_encodings(sizes: &[usize]) -> Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();
    for &n in sizes {
        out.extend(verify_size(n)?);
    }
    Ok(out)
}
