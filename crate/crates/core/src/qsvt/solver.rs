//! Symmetric phase factors in the Wx convention.
//!
//! `P(x) = ⟨0| e^{iφ_0 Z} ∏_{j=1}^{d} W(x) e^{iφ_j Z} |0⟩` with
//! `W(x) = [[x, i√(1−x²)], [i√(1−x²), x]]`; the solver fits `Re P` to a
//! target of definite parity at the positive Chebyshev nodes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const MAX_ITERATIONS: usize = 10_000;
pub const RESIDUAL_TOL: f64 = 1e-14;
pub const GRADIENT_TOL: f64 = 1e-12;

type Row = [Complex64; 2];

fn phase_row(v: Row, phi: f64) -> Row {
    [v[0] * Complex64::from_polar(1.0, phi), v[1] * Complex64::from_polar(1.0, -phi)]
}

fn signal_row(v: Row, x: f64, s: f64) -> Row {
    [v[0] * x + v[1] * I * s, v[0] * I * s + v[1] * x]
}

/// Expands the `⌈(d+1)/2⌉` free phases to the full symmetric sequence.
pub fn expand_symmetric(reduced: &[f64], degree: usize) -> Vec<f64> {
    (0..=degree).map(|j| reduced[j.min(degree - j)]).collect()
}

pub fn reduced_len(degree: usize) -> usize {
    degree / 2 + 1
}

/// `P(x)` for a full phase sequence.
pub fn qsp_polynomial(phis: &[f64], x: f64) -> Complex64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut row = phase_row([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], phis[0]);
    for &phi in &phis[1..] {
        row = phase_row(signal_row(row, x, s), phi);
    }
    row[0]
}

/// `Re P(x)` and its gradient with respect to the reduced phases.
fn value_and_gradient(reduced: &[f64], degree: usize, x: f64) -> (f64, Vec<f64>) {
    let phis = expand_symmetric(reduced, degree);
    let s = (1.0 - x * x).max(0.0).sqrt();
    // right[j] = W e^{iφ_{j+1}Z} W … e^{iφ_d Z} |0⟩, stored as column vectors.
    let zero = Complex64::new(0.0, 0.0);
    let mut right = vec![[zero; 2]; degree + 1];
    right[degree] = [Complex64::new(1.0, 0.0), zero];
    for j in (1..=degree).rev() {
        let v = right[j];
        let v = [v[0] * Complex64::from_polar(1.0, phis[j]), v[1] * Complex64::from_polar(1.0, -phis[j])];
        right[j - 1] = [v[0] * x + v[1] * I * s, v[0] * I * s + v[1] * x];
    }
    let mut grad = vec![0.0; reduced.len()];
    let mut left: Row = [Complex64::new(1.0, 0.0), zero];
    let mut value = zero;
    for j in 0..=degree {
        let l = phase_row(left, phis[j]);
        // ∂/∂φ_j inserts iZ next to e^{iφ_j Z}.
        let d = I * (l[0] * right[j][0] - l[1] * right[j][1]);
        grad[j.min(degree - j)] += d.re;
        if j == degree {
            value = l[0] * right[j][0] + l[1] * right[j][1];
        }
        left = if j < degree { signal_row(l, x, s) } else { l };
    }
    (value.re, grad)
}

/// Positive Chebyshev nodes `cos((2m−1)π/(4d̃))`, `m = 1..d̃`.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|m| ((2 * m - 1) as f64 * std::f64::consts::PI / (4 * count) as f64).cos())
        .collect()
}

/// Full symmetric phases with `Re P ≈ f` on the nodes.
///
/// Levenberg–Marquardt steps with a vanishing damping reduce to Newton; the
/// damping only grows when a step fails to decrease the residual.
pub fn solve(degree: usize, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let n = reduced_len(degree);
    let nodes = chebyshev_nodes(n);
    let targets: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let mut reduced = vec![0.0; n];
    reduced[0] = std::f64::consts::FRAC_PI_4;
    if degree == 0 {
        // Single phase: Re P = cos φ_0, constant in x.
        let c = targets[0].clamp(-1.0, 1.0);
        return Ok(vec![c.acos()]);
    }

    let evaluate = |r: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let mut res = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, n);
        for (m, &x) in nodes.iter().enumerate() {
            let (v, g) = value_and_gradient(r, degree, x);
            res[m] = v - targets[m];
            for (k, gk) in g.into_iter().enumerate() {
                jac[(m, k)] = gk;
            }
        }
        (res, jac)
    };

    let (mut res, mut jac) = evaluate(&reduced);
    let mut cost = res.norm_squared();
    let mut mu = 1e-12;
    for _ in 0..MAX_ITERATIONS {
        if res.amax() < RESIDUAL_TOL {
            return Ok(expand_symmetric(&reduced, degree));
        }
        let grad = jac.transpose() * &res;
        if grad.amax() < GRADIENT_TOL * 1e-3 && res.amax() < 1e-10 {
            return Ok(expand_symmetric(&reduced, degree));
        }
        let normal = jac.transpose() * &jac;
        let mut accepted = false;
        for _ in 0..60 {
            let damped = &normal + DMatrix::identity(n, n) * mu;
            let Some(chol) = damped.cholesky() else {
                mu = (mu * 10.0).max(1e-12);
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial: Vec<f64> = reduced.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (r_new, j_new) = evaluate(&trial);
            let c_new = r_new.norm_squared();
            if c_new < cost {
                reduced = trial;
                res = r_new;
                jac = j_new;
                cost = c_new;
                mu = (mu * 0.1).max(1e-15);
                accepted = true;
                break;
            }
            mu = (mu * 10.0).max(1e-12);
        }
        if !accepted {
            break;
        }
    }
    if res.amax() < 1e-10 {
        return Ok(expand_symmetric(&reduced, degree));
    }
    Err(Error::PhaseSolver { iterations: MAX_ITERATIONS, best_error: res.amax() })
}
