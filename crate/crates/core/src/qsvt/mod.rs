//! Phase synthesis, projector-controlled phases and the QSVT sequence.

mod cache;
pub mod chebyshev;
pub mod solver;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::block_encoding::BlockEncoding;
use crate::circuit::{Circuit, Control, Gate};
use crate::dense::hermiticity_defect;
use crate::error::{Error, Result};

pub use cache::PhaseCache;

/// Points in the accuracy check over `[−1, 1]`.
pub const CHECK_GRID: usize = 401;
pub const HERMITIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(degree: usize) -> Self {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Polynomial degrees for the cosine and sine branches of `e^{−iĤτ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreePlan {
    pub tau: f64,
    pub k: usize,
    pub d_sin: usize,
    pub d_cos: usize,
}

impl DegreePlan {
    /// The even member of `{d_sin, d_cos}`; the cosine series lives there.
    pub fn cos_degree(&self) -> usize {
        if self.d_sin.is_multiple_of(2) {
            self.d_sin
        } else {
            self.d_cos
        }
    }

    /// The odd member of `{d_sin, d_cos}`.
    pub fn sin_degree(&self) -> usize {
        self.d_sin + self.d_cos - self.cos_degree()
    }

    /// Calls to the underlying encoding across both branches.
    pub fn total_calls(&self) -> usize {
        self.d_sin + self.d_cos
    }
}

pub fn plan_degree(t: f64, epsilon: f64, alpha_h: f64) -> Result<DegreePlan> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidConfig(format!("time must be non-negative, got {t}")));
    }
    let tau = 2.0 * alpha_h * t;
    let k = (1.4 * tau + (1.0 / epsilon).ln()).ceil() as usize;
    let (d_sin, d_cos) = if k.is_multiple_of(2) { (k, k - 1) } else { (k - 1, k) };
    Ok(DegreePlan { tau, k, d_sin, d_cos })
}

/// Truncated Jacobi–Anger series in the Chebyshev basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevTargets {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

pub fn chebyshev_targets(plan: &DegreePlan) -> ChebyshevTargets {
    ChebyshevTargets {
        cos: chebyshev::cos_half_coefficients(plan.tau, plan.cos_degree()),
        sin: chebyshev::sin_half_coefficients(plan.tau, plan.sin_degree()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetFunction {
    /// `cos(τx)/2`.
    CosHalf { tau: f64 },
    /// `sin(τx)/2`.
    SinHalf { tau: f64 },
    /// `Σ c_n T_n(x)` of definite parity.
    Chebyshev { coeffs: Vec<f64> },
}

impl TargetFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TargetFunction::CosHalf { tau } => 0.5 * (tau * x).cos(),
            TargetFunction::SinHalf { tau } => 0.5 * (tau * x).sin(),
            TargetFunction::Chebyshev { coeffs } => chebyshev::evaluate(coeffs, x),
        }
    }

    /// `None` for a Chebyshev list mixing even and odd terms.
    pub fn parity(&self) -> Option<Parity> {
        match self {
            TargetFunction::CosHalf { .. } => Some(Parity::Even),
            TargetFunction::SinHalf { tau } if *tau == 0.0 => None,
            TargetFunction::SinHalf { .. } => Some(Parity::Odd),
            TargetFunction::Chebyshev { coeffs } => {
                let has = |p: usize| coeffs.iter().enumerate().any(|(n, c)| n % 2 == p && *c != 0.0);
                match (has(0), has(1)) {
                    (true, true) => None,
                    (false, true) => Some(Parity::Odd),
                    _ => Some(Parity::Even),
                }
            }
        }
    }

    fn accepts(&self, parity: Parity) -> bool {
        match self {
            // The zero function has both parities.
            TargetFunction::SinHalf { tau } if *tau == 0.0 => true,
            TargetFunction::Chebyshev { coeffs } if coeffs.iter().all(|c| *c == 0.0) => true,
            _ => self.parity() == Some(parity),
        }
    }

    /// Chebyshev coefficients up to `degree`.
    pub fn series(&self, degree: usize) -> Vec<f64> {
        match self {
            TargetFunction::CosHalf { tau } => chebyshev::cos_half_coefficients(*tau, degree),
            TargetFunction::SinHalf { tau } => chebyshev::sin_half_coefficients(*tau, degree),
            TargetFunction::Chebyshev { coeffs } => {
                let mut c = coeffs.clone();
                c.resize(degree + 1, 0.0);
                c
            }
        }
    }
}

impl fmt::Display for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetFunction::CosHalf { tau } => write!(f, "cos_half-tau{tau:.12}"),
            TargetFunction::SinHalf { tau } => write!(f, "sin_half-tau{tau:.12}"),
            TargetFunction::Chebyshev { coeffs } => {
                write!(f, "chebyshev")?;
                coeffs.iter().try_for_each(|c| write!(f, "_{c:e}"))
            }
        }
    }
}

/// Solved phases. `phis` are in the Wx convention; `varphis` drive the circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSequence {
    pub phis: Vec<f64>,
    pub varphis: Vec<f64>,
    pub parity: Parity,
    pub degree: usize,
    pub target: TargetFunction,
    pub achieved_error: f64,
}

impl PhaseSequence {
    /// Wraps Wx phases; `achieved_error` is measured on the check grid.
    pub fn from_phis(phis: Vec<f64>, target: TargetFunction) -> Self {
        let degree = phis.len() - 1;
        let varphis = varphis_from_phis(&phis);
        let mut ps = PhaseSequence {
            phis,
            varphis,
            parity: Parity::of(degree),
            degree,
            target,
            achieved_error: 0.0,
        };
        ps.achieved_error = ps.grid_error();
        ps
    }

    pub fn polynomial(&self, x: f64) -> Complex64 {
        solver::qsp_polynomial(&self.phis, x)
    }

    /// Max `|Re P(x) − target(x)|` over the check grid.
    pub fn grid_error(&self) -> f64 {
        (0..CHECK_GRID)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / (CHECK_GRID - 1) as f64;
                (self.polynomial(x).re - self.target.eval(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn phase_offsets(len: usize) -> impl Iterator<Item = f64> {
    (0..len).map(move |j| match (len, j) {
        (1, _) => 0.0,
        (_, 0) => FRAC_PI_4,
        (l, j) if j + 1 == l => FRAC_PI_4,
        _ => FRAC_PI_2,
    })
}

/// Ends shift by π/4, interior phases by π/2.
pub fn varphis_from_phis(phis: &[f64]) -> Vec<f64> {
    phis.iter().zip(phase_offsets(phis.len())).map(|(p, o)| p + o).collect()
}

pub fn phis_from_varphis(varphis: &[f64]) -> Vec<f64> {
    varphis.iter().zip(phase_offsets(varphis.len())).map(|(p, o)| p - o).collect()
}

/// Solves for `Re P ≈ target` with a degree-`degree` symmetric sequence.
pub fn solve_phases(target: &TargetFunction, degree: usize, tol: f64) -> Result<PhaseSequence> {
    let parity = Parity::of(degree);
    if !target.accepts(parity) {
        return Err(Error::ParityMismatch { degree });
    }
    let series = target.series(degree);
    let phis = solver::solve(degree, |x| chebyshev::evaluate(&series, x))?;
    let ps = PhaseSequence::from_phis(phis, target.clone());
    if ps.achieved_error > tol {
        return Err(Error::PhaseAccuracy { achieved: ps.achieved_error, requested: tol });
    }
    Ok(ps)
}

/// `e^{iφ(2Π−I)}` with `Π = |0^a⟩⟨0^a|`, on `[scratch][a ancillas]`.
pub fn projector_phase(a: usize, phi: f64) -> Circuit {
    let mut c = Circuit::new(a + 1, "Pi_phase");
    let flip = Gate::x(0).with_controls((1..=a).map(Control::open));
    c.push(flip.clone()).expect("in range");
    c.push(Gate::rz(0, 2.0 * phi)).expect("in range");
    c.push(flip).expect("in range");
    c
}

/// Builds the Hadamard-wrapped QSVT sequence on `[scratch][be ancillas][signal]`.
///
/// The output block is `Re P(A)` for the Wx polynomial `P` of `ps`, where `A`
/// is the block of `be`. Each use of `be` is recorded as a call.
pub fn qsvt_sequence(be: &BlockEncoding, ps: &PhaseSequence) -> Result<BlockEncoding> {
    if ps.parity != Parity::of(ps.degree) || ps.varphis.len() != ps.degree + 1 {
        return Err(Error::ParityMismatch { degree: ps.degree });
    }
    let defect = hermiticity_defect(&be.block());
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let a = be.ancillas;
    let width = be.width() + 1;
    let u_map: Vec<usize> = (1..width).collect();
    let pi_map: Vec<usize> = (0..=a).collect();
    let u_dag = be.circuit.dagger();
    let d = ps.degree;
    let odd = d % 2 == 1;

    let mut c = Circuit::new(width, format!("QSVT[{}]", ps.target));
    c.push(Gate::h(0))?;
    if odd {
        // Turns the i^d from the phase offsets into a real prefactor.
        c.push(Gate::rz(0, -PI))?;
    }
    let flips = if odd { d % 4 == 3 } else { d % 4 == 2 };
    if flips {
        c.push(Gate::rz(0, 2.0 * PI))?;
    }
    let sign = if odd { -1.0 } else { 1.0 };
    for j in (0..=d).rev() {
        c.append_mapped(&projector_phase(a, sign * ps.varphis[j]), &pi_map)?;
        if j > 0 {
            let u = if (d - j).is_multiple_of(2) { &be.circuit } else { &u_dag };
            c.append_call(u, &u_map)?;
        }
    }
    c.push(Gate::h(0))?;
    let epsilon = ps.achieved_error + d as f64 * be.epsilon / be.alpha;
    BlockEncoding::new(c, 1.0, a + 1, epsilon)
}
