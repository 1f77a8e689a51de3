//! Dense linear-algebra helpers used for verification.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // The Frobenius norm bounds the spectral norm from above and is free.
    let fro = m.norm();
    if fro == 0.0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `f(H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(&f));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `e^{-iHt}` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(h, |lambda| Complex64::from_polar(1.0, -lambda * t))
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `‖M − M†‖₂`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// `‖U†U − I‖₂`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    spectral_norm(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// Zero-pads a square matrix to size `dim`.
pub fn pad_square(m: &RMatrix, dim: usize) -> RMatrix {
    let mut out = RMatrix::zeros(dim, dim);
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}
