//! Block encodings of incidence, diagonal and `B` matrices.
//!
//! Index registers are big-endian with the encoding's ancillas on top. For
//! chain lengths that are not a power of two the incidence matrix is
//! embedded in the next power of two with one extra ancilla that parks
//! out-of-range entries.

use crate::block_encoding::{bitstring_controls, product, BlockEncoding};
use crate::circuit::{Circuit, Control, Gate, Polarity};
use crate::error::{Error, Result};
use crate::oscillator::{Boundary, OscillatorSystem};

/// Cyclic increment `|j⟩ → |j+1 mod 2^n⟩`.
///
/// Each wire is flipped when every less significant wire is 1, starting
/// from the most significant one.
pub fn l_shift_circuit(n: usize) -> Circuit {
    let mut c = Circuit::new(n, format!("L{}", 1usize << n));
    for target in 0..n {
        let controls: Vec<usize> = (target + 1..n).collect();
        c.push(Gate::mcx(&controls, target)).expect("in range");
    }
    c
}

fn log2_exact(n: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// (2, 1, 0) encoding of `I − L_N` for `N = 2^n`.
pub fn be_uniform_closed(n_osc: usize) -> Result<BlockEncoding> {
    let n = log2_exact(n_osc)?;
    let mut c = Circuit::new(n + 1, "Bc");
    c.push(Gate::h(0))?;
    let shift: Vec<usize> = (1..=n).collect();
    let mut controlled = Circuit::new(n + 1, "");
    controlled.append_mapped(&l_shift_circuit(n), &shift)?;
    c.append(&controlled.add_control(0, Polarity::Closed)?)?;
    c.push(Gate::h(0))?;
    c.push(Gate::x(0))?;
    BlockEncoding::new(c, 2.0, 1, 0.0)
}

/// (1, 1, 0) encoding of `I′_N` (identity with the last diagonal entry zeroed).
pub fn be_identity_prime(n_osc: usize) -> Result<BlockEncoding> {
    let n = log2_exact(n_osc)?;
    let mut c = Circuit::new(n + 1, "I'");
    let controls: Vec<usize> = (1..=n).collect();
    c.push(Gate::mcx(&controls, 0))?;
    BlockEncoding::new(c, 1.0, 1, 0.0)
}

/// (1, 1, 0) encoding of `L′_N` (shift with the wrap-around entry removed).
pub fn be_shift_prime(n_osc: usize) -> Result<BlockEncoding> {
    let n = log2_exact(n_osc)?;
    BlockEncoding::new(l_shift_circuit(n + 1).with_label("L'"), 1.0, 1, 0.0)
}

/// (2, 2, 0) encoding of `I′_N − L′_N` for `N = 2^n`.
pub fn be_uniform_open(n_osc: usize) -> Result<BlockEncoding> {
    let i_prime = be_identity_prime(n_osc)?;
    let l_prime = be_shift_prime(n_osc)?;
    two_term_difference(&i_prime, &l_prime, "Bo")
}

/// `H, open-controlled first, closed-controlled second, H, X` on a fresh top
/// wire: a (2, a+1, 0) encoding of `first − second`.
fn two_term_difference(first: &BlockEncoding, second: &BlockEncoding, label: &str) -> Result<BlockEncoding> {
    let width = first.width() + 1;
    let map: Vec<usize> = (1..width).collect();
    let mut c = Circuit::new(width, label);
    c.push(Gate::h(0))?;
    for (enc, polarity) in [(first, Polarity::Open), (second, Polarity::Closed)] {
        let mut term = Circuit::new(width, enc.label());
        term.append_call(&enc.circuit, &map)?;
        c.append(&term.add_control(0, polarity)?)?;
    }
    c.push(Gate::h(0))?;
    c.push(Gate::x(0))?;
    BlockEncoding::new(c, 2.0, first.ancillas + 1, 0.0)
}

/// (1, 1, 0) encoding of `diag(d)`, zero-padded to a power of two (at least 2).
pub fn be_diagonal(values: &[f64]) -> Result<BlockEncoding> {
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, d)| d.abs() > 1.0 || d.is_nan()) {
        return Err(Error::DiagonalOutOfRange { index, value });
    }
    let dim = values.len().next_power_of_two().max(2);
    let n = dim.trailing_zeros() as usize;
    let mut c = Circuit::new(n + 1, "diag");
    for i in 0..dim {
        let d = values.get(i).copied().unwrap_or(0.0);
        c.push(Gate::ry(0, 2.0 * d.acos()).with_controls(bitstring_controls(i, 1, n)))?;
    }
    BlockEncoding::new(c, 1.0, 1, 0.0)
}

/// Geometry of the power-of-two embedding of an `N`-oscillator chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaddedShape {
    pub n: usize,
    pub n_tilde: usize,
    pub dim: usize,
    /// 0 for the identity, 1 for the primed identity and both shifts.
    pub g: usize,
}

impl PaddedShape {
    pub fn new(n: usize, g: usize) -> Self {
        let dim = n.next_power_of_two();
        PaddedShape { n, n_tilde: dim.trailing_zeros() as usize, dim, g }
    }
}

/// Involution on `[ancilla][index]` swapping every index `≥ N − g` between
/// the ancilla-0 and ancilla-1 halves.
///
/// Built as a comparator: a multi-controlled NOT onto the ancilla for each
/// prefix of the index that certifies `index ≥ N − g`, with earlier
/// certified prefixes excluded through open controls.
pub fn xi_gate(shape: PaddedShape) -> Circuit {
    let PaddedShape { n, n_tilde, dim, g } = shape;
    let mut c = Circuit::new(n_tilde + 1, format!("Xi{g}"));
    let threshold = n - g;
    let mut h = dim;
    let mut excluded: Vec<usize> = Vec::new();
    for i in 1..=n_tilde {
        let step = 1usize << (n_tilde - i);
        if h - step >= threshold {
            let controls = (1..=i).map(|q| {
                if excluded.contains(&q) {
                    Control::open(q)
                } else {
                    Control::closed(q)
                }
            });
            c.push(Gate::x(0).with_controls(controls)).expect("in range");
            excluded.push(i);
            h -= step;
        }
    }
    c
}

/// Zero-padded building blocks of the padded incidence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaddedKind {
    /// `pad(I_N)`
    Identity,
    /// `pad(I′_N)`
    IdentityPrime,
    /// `pad(L_N)`
    Shift,
    /// `pad(L′_N)`
    ShiftPrime,
}

/// (1, 1, 0) encoding of a padded identity or shift on `⌈log₂N⌉` qubits.
pub fn be_padded(kind: PaddedKind, n_osc: usize) -> Result<BlockEncoding> {
    if n_osc < 2 {
        return Err(Error::InvalidSystem(format!("need at least 2 oscillators, got {n_osc}")));
    }
    let g = usize::from(kind != PaddedKind::Identity);
    let shape = PaddedShape::new(n_osc, g);
    let width = shape.n_tilde + 1;
    let mut c = Circuit::new(width, format!("{kind:?}"));
    c.append(&xi_gate(shape))?;
    match kind {
        PaddedKind::Identity | PaddedKind::IdentityPrime => {}
        PaddedKind::Shift => {
            // Send index N−g of the lower half to the last basis state, from
            // which the full-width increment wraps it to index 0.
            let last = shape.n - g;
            for q in 1..width {
                if (last >> (shape.n_tilde - q)) & 1 == 0 {
                    c.push(Gate::x(q).with_control(Control::closed(0)))?;
                }
            }
            c.append(&l_shift_circuit(width))?;
        }
        PaddedKind::ShiftPrime => {
            let index: Vec<usize> = (1..width).collect();
            c.append_mapped(&l_shift_circuit(shape.n_tilde), &index)?;
        }
    }
    BlockEncoding::new(c, 1.0, 1, 0.0)
}

/// (2, 2, 0) encoding of the zero-padded incidence matrix of a uniform chain
/// of any length.
pub fn be_padded_incidence(n_osc: usize, boundary: Boundary) -> Result<BlockEncoding> {
    let (ident, shift) = match boundary {
        Boundary::Closed => (PaddedKind::Identity, PaddedKind::Shift),
        Boundary::Open => (PaddedKind::IdentityPrime, PaddedKind::ShiftPrime),
    };
    two_term_difference(&be_padded(ident, n_osc)?, &be_padded(shift, n_osc)?, "Phi")
}

/// Encoding of the unit-weight incidence matrix: the uniform circuits for
/// power-of-two lengths, the padded ones otherwise.
pub fn be_incidence(n_osc: usize, boundary: Boundary) -> Result<BlockEncoding> {
    let enc = match (n_osc.is_power_of_two(), boundary) {
        (true, Boundary::Closed) => be_uniform_closed(n_osc)?,
        (true, Boundary::Open) => be_uniform_open(n_osc)?,
        (false, _) => be_padded_incidence(n_osc, boundary)?,
    };
    Ok(enc.with_label("Phi"))
}

/// Encoding of `B = √M⁻¹ Φ √W` as the product of two diagonal encodings and
/// the incidence encoding; layout `[√M⁻¹ anc][Φ anc][√W anc][index]`.
pub fn be_general_b(sys: &OscillatorSystem) -> Result<BlockEncoding> {
    if !sys.is_rescaled() {
        return Err(Error::InvalidSystem("masses must be ≥ 1 and springs ≤ 1; rescale first".into()));
    }
    let inv_sqrt_mass: Vec<f64> = sys.masses().iter().map(|m| 1.0 / m.sqrt()).collect();
    let sqrt_springs: Vec<f64> = sys.springs().iter().map(|k| k.sqrt()).collect();
    let mass = be_diagonal(&inv_sqrt_mass)?.with_label("sqrtMinv");
    let springs = be_diagonal(&sqrt_springs)?.with_label("sqrtW");
    let incidence = be_incidence(sys.len(), sys.boundary())?;
    Ok(product(&mass, &product(&incidence, &springs)?)?.with_label("B"))
}

/// Encoding of `B` for a system: the bare incidence encoding for uniform
/// power-of-two chains, [`be_general_b`] otherwise.
pub fn be_b(sys: &OscillatorSystem) -> Result<BlockEncoding> {
    if sys.is_uniform() {
        Ok(be_incidence(sys.len(), sys.boundary())?.with_label("B"))
    } else {
        be_general_b(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{to_complex, CMatrix, RMatrix};
    use crate::oscillator::build_matrices;
    use crate::statevector::{circuit_matrix, StateVector};
    use num_complex::Complex64;

    fn real(rows: usize, data: &[f64]) -> CMatrix {
        to_complex(&RMatrix::from_row_slice(rows, rows, data))
    }

    /// Permutation matrix with `perm[j]` the image of basis state `j`.
    fn permutation(perm: &[usize]) -> CMatrix {
        let n = perm.len();
        CMatrix::from_fn(n, n, |r, c| Complex64::new(f64::from(u8::from(perm[c] == r)), 0.0))
    }

    #[test]
    fn l_shift_small_cases() {
        let l2 = l_shift_circuit(1);
        assert_eq!(l2.gates, vec![Gate::x(0)]);
        let l4 = l_shift_circuit(2);
        assert_eq!(l4.gates, vec![Gate::mcx(&[1], 0), Gate::x(1)]);
        assert_eq!(circuit_matrix(&l4), permutation(&[1, 2, 3, 0]));
    }

    #[test]
    fn l_shift_exhaustive() {
        for n in 1..=4 {
            let c = l_shift_circuit(n);
            for j in 0..1usize << n {
                let mut s = StateVector::basis(n, j);
                s.apply(&c).unwrap();
                assert_eq!(s.amplitudes()[(j + 1) % (1 << n)], Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn controlled_l4_is_block_diagonal() {
        let mut wide = Circuit::new(3, "");
        wide.append_mapped(&l_shift_circuit(2), &[1, 2]).unwrap();
        let m = circuit_matrix(&wide.add_control(0, Polarity::Closed).unwrap());
        assert_eq!(m, permutation(&[0, 1, 2, 3, 5, 6, 7, 4]));
    }

    #[test]
    fn uniform_closed_examples() {
        let be = be_uniform_closed(4).unwrap();
        assert_eq!(be.width(), 3);
        let want = real(4, &[1., 0., 0., -1., -1., 1., 0., 0., 0., -1., 1., 0., 0., 0., -1., 1.]);
        assert!(be.verify(&want).unwrap() < 1e-12);
        let hist = be.circuit.count_gates();
        assert_eq!((hist.total_of("H"), hist.get("X", 0)), (2, 1));
        // Wrong alpha leaves half the matrix behind.
        let mut wrong = be.clone();
        wrong.alpha = 1.0;
        assert!((wrong.verify(&want).unwrap() - 1.0).abs() < 1e-12);
        let be2 = be_uniform_closed(2).unwrap();
        assert!(be2.verify(&real(2, &[1., -1., -1., 1.])).unwrap() < 1e-12);
        assert!(matches!(be_uniform_closed(6), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn uniform_open_examples() {
        let be = be_uniform_open(2).unwrap();
        assert_eq!((be.alpha, be.ancillas), (2.0, 2));
        assert!(be.verify(&real(2, &[1., 0., -1., 0.])).unwrap() < 1e-12);
        let ip = be_identity_prime(4).unwrap();
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [1.0, 1.0, 1.0, 0.0].map(|x| Complex64::new(x, 0.0)).to_vec(),
        ));
        assert!(ip.verify(&want).unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_examples() {
        let d = [1.0, std::f64::consts::FRAC_1_SQRT_2, 0.5, 0.9];
        let be = be_diagonal(&d).unwrap();
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.map(|x| Complex64::new(x, 0.0)).to_vec()));
        assert!(be.verify(&want).unwrap() < 1e-12);
        let ones = be_diagonal(&[1.0; 4]).unwrap();
        assert!(ones.circuit.gates.iter().all(|g| g.kind == crate::circuit::GateKind::Ry(0.0)));
        assert!(matches!(be_diagonal(&[0.5, 1.5]), Err(Error::DiagonalOutOfRange { index: 1, .. })));
    }

    #[test]
    fn xi_identity_when_no_padding() {
        for n in [2, 4, 8] {
            assert!(xi_gate(PaddedShape::new(n, 0)).is_empty());
        }
    }

    #[test]
    fn xi_three_oscillators_g1() {
        let m = circuit_matrix(&xi_gate(PaddedShape::new(3, 1)));
        assert_eq!(m, permutation(&[0, 1, 6, 7, 4, 5, 2, 3]));
        assert_eq!(&m * &m, CMatrix::identity(8, 8));
    }

    #[test]
    fn padded_three_oscillator_blocks() {
        let ident = be_padded(PaddedKind::Identity, 3).unwrap().block();
        assert_eq!(ident, real(4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0.]));
        let shift_prime = be_padded(PaddedKind::ShiftPrime, 3).unwrap().block();
        assert_eq!(shift_prime, real(4, &[0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0.]));
    }

    #[test]
    fn general_b_of_uniform_chain_matches_incidence() {
        let sys = OscillatorSystem::uniform(4, Boundary::Closed).unwrap();
        let general = be_general_b(&sys).unwrap();
        let uniform = be_uniform_closed(4).unwrap();
        assert_eq!(general.alpha, uniform.alpha);
        assert!((general.encoded_matrix() - uniform.encoded_matrix()).norm() < 1e-12);
        let b = to_complex(&build_matrices(&sys).b);
        assert!(general.verify(&b).unwrap() < 1e-12);
    }

    #[test]
    fn general_b_requires_rescaled_system() {
        let sys = OscillatorSystem::new(vec![0.5, 1.0], vec![1.0], Boundary::Open).unwrap();
        assert!(be_general_b(&sys).is_err());
    }
}
