//! Spring-mass chains: matrices, encoded initial state, classical reference.
//!
//! Oscillators sit in indices `0..N`. Edge `e < N−1` joins oscillators `e`
//! and `e+1`; edge `N−1` is the wrap-around spring joining the last
//! oscillator to the first, present only for closed chains. All matrices are
//! zero-padded to the next power of two.

use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::RMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSystem {
    masses: Vec<f64>,
    springs: Vec<f64>,
    boundary: Boundary,
}

impl OscillatorSystem {
    /// `springs` lists the `N−1` chain springs followed by the wrap-around
    /// spring; for open chains the wrap-around entry may be omitted.
    pub fn new(masses: Vec<f64>, mut springs: Vec<f64>, boundary: Boundary) -> Result<Self> {
        let n = masses.len();
        if n < 2 {
            return Err(Error::InvalidSystem(format!("need at least 2 oscillators, got {n}")));
        }
        if boundary == Boundary::Open && springs.len() == n - 1 {
            springs.push(0.0);
        }
        if springs.len() != n {
            return Err(Error::InvalidSystem(format!("expected {n} spring constants, got {}", springs.len())));
        }
        if let Some(m) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidSystem(format!("nonpositive mass {m}")));
        }
        if let Some(k) = springs.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(Error::InvalidSystem(format!("negative spring constant {k}")));
        }
        let wrap = springs[n - 1];
        match boundary {
            Boundary::Open if wrap != 0.0 => {
                return Err(Error::InvalidSystem("open chain with a wrap-around spring".into()))
            }
            Boundary::Closed if wrap == 0.0 => {
                return Err(Error::InvalidSystem("closed chain without a wrap-around spring".into()))
            }
            _ => {}
        }
        Ok(OscillatorSystem { masses, springs, boundary })
    }

    /// Unit masses and unit springs.
    pub fn uniform(n: usize, boundary: Boundary) -> Result<Self> {
        let mut springs = vec![1.0; n];
        if boundary == Boundary::Open {
            springs[n - 1] = 0.0;
        }
        Self::new(vec![1.0; n], springs, boundary)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn springs(&self) -> &[f64] {
        &self.springs
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// `⌈log₂N⌉`.
    pub fn index_qubits(&self) -> usize {
        self.len().next_power_of_two().trailing_zeros() as usize
    }

    pub fn padded_len(&self) -> usize {
        self.len().next_power_of_two()
    }

    /// Masses ≥ 1 and springs ≤ 1, as required by the diagonal encodings.
    pub fn is_rescaled(&self) -> bool {
        self.masses.iter().all(|&m| m >= 1.0) && self.springs.iter().all(|&k| k <= 1.0)
    }

    /// Unit masses, unit springs and a power-of-two size.
    pub fn is_uniform(&self) -> bool {
        let n = self.len();
        n.is_power_of_two()
            && self.masses.iter().all(|&m| m == 1.0)
            && self.springs[..n - 1].iter().all(|&k| k == 1.0)
            && (self.boundary == Boundary::Open || self.springs[n - 1] == 1.0)
    }
}

/// Factors applied by [`rescale`]: springs were divided by `spring`, masses
/// by `mass`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactors {
    pub spring: f64,
    pub mass: f64,
}

impl ScaleFactors {
    pub const IDENTITY: ScaleFactors = ScaleFactors { spring: 1.0, mass: 1.0 };

    /// Ratio of rescaled time to physical time, `√(spring/mass)`.
    pub fn time_factor(&self) -> f64 {
        (self.spring / self.mass).sqrt()
    }
}

/// Brings springs into `(0, 1]` and masses to `≥ 1`; already-valid inputs are
/// left untouched.
pub fn rescale(masses: &[f64], springs: &[f64], boundary: Boundary) -> Result<(OscillatorSystem, ScaleFactors)> {
    let k_max = springs.iter().copied().fold(0.0, f64::max);
    let m_min = masses.iter().copied().fold(f64::INFINITY, f64::min);
    let factors = ScaleFactors { spring: k_max.max(1.0), mass: m_min.min(1.0) };
    let sys = OscillatorSystem::new(
        masses.iter().map(|m| m / factors.mass).collect(),
        springs.iter().map(|k| k / factors.spring).collect(),
        boundary,
    )?;
    Ok((sys, factors))
}

/// Mass, stiffness, spring-weight, incidence, `A` and `B` matrices,
/// zero-padded to the next power of two.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub mass: RMatrix,
    pub stiffness: RMatrix,
    pub spring_weights: RMatrix,
    pub incidence: RMatrix,
    pub a: RMatrix,
    pub b: RMatrix,
}

pub fn build_matrices(sys: &OscillatorSystem) -> SystemMatrices {
    let n = sys.len();
    let dim = sys.padded_len();
    let k = sys.springs();
    let mut mass = RMatrix::zeros(dim, dim);
    let mut inv_sqrt_mass = RMatrix::zeros(dim, dim);
    let mut spring_weights = RMatrix::zeros(dim, dim);
    let mut sqrt_weights = RMatrix::zeros(dim, dim);
    let mut incidence = RMatrix::zeros(dim, dim);
    for j in 0..n {
        mass[(j, j)] = sys.masses()[j];
        inv_sqrt_mass[(j, j)] = 1.0 / sys.masses()[j].sqrt();
        spring_weights[(j, j)] = k[j];
        sqrt_weights[(j, j)] = k[j].sqrt();
    }
    for e in 0..n - 1 {
        incidence[(e, e)] = 1.0;
        incidence[(e + 1, e)] = -1.0;
    }
    if sys.boundary() == Boundary::Closed {
        incidence[(n - 1, n - 1)] = 1.0;
        incidence[(0, n - 1)] = -1.0;
    }
    let stiffness = &incidence * &spring_weights * incidence.transpose();
    let a = &inv_sqrt_mass * &stiffness * &inv_sqrt_mass;
    let b = &inv_sqrt_mass * &incidence * &sqrt_weights;
    SystemMatrices { mass, stiffness, spring_weights, incidence, a, b }
}

/// Displacements, velocities and time of the physical chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl ClassicalState {
    /// `½ẋᵀMẋ + ½xᵀFx`.
    pub fn energy(&self, mats: &SystemMatrices) -> f64 {
        let n = self.x.len();
        let mut e = 0.0;
        for i in 0..n {
            e += 0.5 * mats.mass[(i, i)] * self.v[i] * self.v[i];
            for j in 0..n {
                e += 0.5 * self.x[i] * mats.stiffness[(i, j)] * self.x[j];
            }
        }
        e
    }
}

/// Normalized `(ẏ ; iB†y)` over `1 + ⌈log₂N⌉` qubits with its original norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedState {
    pub amplitudes: Vec<Complex64>,
    pub norm: f64,
}

impl EncodedState {
    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }
}

pub fn encode_initial(sys: &OscillatorSystem, mats: &SystemMatrices, cs: &ClassicalState) -> Result<EncodedState> {
    let n = sys.len();
    let dim = sys.padded_len();
    if cs.x.len() != n || cs.v.len() != n {
        return Err(Error::InvalidSystem(format!("initial state must have {n} components")));
    }
    let mut y = DVector::zeros(dim);
    let mut amplitudes = vec![Complex64::default(); 2 * dim];
    for j in 0..n {
        let s = sys.masses()[j].sqrt();
        y[j] = s * cs.x[j];
        amplitudes[j] = Complex64::new(s * cs.v[j], 0.0);
    }
    let bty = mats.b.transpose() * y;
    for j in 0..dim {
        amplitudes[dim + j] = Complex64::new(0.0, bty[j]);
    }
    let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    Ok(EncodedState { amplitudes, norm })
}

/// Velocities `ẋ_j = Re(amplitude_j)·norm/√m_j` from the top half of an
/// encoded state.
pub fn read_velocities(sys: &OscillatorSystem, amplitudes: &[Complex64], norm: f64) -> Vec<f64> {
    sys.masses().iter().enumerate().map(|(j, m)| amplitudes[j].re * norm / m.sqrt()).collect()
}

/// Integrates `Mẍ = −Fx` with classic RK4 and reports the state at each
/// requested time (ascending, not before `cs0.t`).
pub fn rk4_solve(sys: &OscillatorSystem, cs0: &ClassicalState, sample_times: &[f64], dt: f64) -> Vec<ClassicalState> {
    let n = sys.len();
    let mats = build_matrices(sys);
    let accel = RMatrix::from_fn(n, n, |i, j| -mats.stiffness[(i, j)] / sys.masses()[i]);
    let deriv = |x: &DVector<f64>, v: &DVector<f64>| (v.clone(), &accel * x);
    let mut x = DVector::from_column_slice(&cs0.x);
    let mut v = DVector::from_column_slice(&cs0.v);
    let mut t = cs0.t;
    let mut out = Vec::with_capacity(sample_times.len());
    for &target in sample_times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                let (k1x, k1v) = deriv(&x, &v);
                let (k2x, k2v) = deriv(&(&x + &k1x * (h / 2.0)), &(&v + &k1v * (h / 2.0)));
                let (k3x, k3v) = deriv(&(&x + &k2x * (h / 2.0)), &(&v + &k2v * (h / 2.0)));
                let (k4x, k4v) = deriv(&(&x + &k3x * h), &(&v + &k3v * h));
                x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
                v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
            }
            t = target;
        }
        out.push(ClassicalState { x: x.iter().copied().collect(), v: v.iter().copied().collect(), t: target });
    }
    out
}

/// Trapezoidal integration of uniformly sampled velocities.
pub fn recover_displacement(velocities: &[Vec<f64>], x0: &[f64], dt: f64) -> Result<Vec<Vec<f64>>> {
    if velocities.len() < 2 {
        return Err(Error::TooFewSamples);
    }
    let mut out = vec![x0.to_vec()];
    for pair in velocities.windows(2) {
        let prev = out.last().expect("seeded");
        let next = prev.iter().zip(&pair[0]).zip(&pair[1]).map(|((x, a), b)| x + 0.5 * dt * (a + b)).collect();
        out.push(next);
    }
    Ok(out)
}

const RELATIVE_FLOOR: f64 = 1e-12;

/// `log10(‖a_t − b_t‖ / max(‖b_t‖, floor))`, clamped below at `log10(floor)`.
pub fn relative_error(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    a.iter()
        .zip(b)
        .map(|(at, bt)| {
            let diff = norm(&mut at.iter().zip(bt).map(|(p, q)| p - q));
            let scale = norm(&mut bt.iter().copied()).max(RELATIVE_FLOOR);
            (diff / scale).max(RELATIVE_FLOOR).log10()
        })
        .collect()
}

/// Sampled quantum and classical trajectories with per-instant errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub v_quantum: Vec<Vec<f64>>,
    pub v_classical: Vec<Vec<f64>>,
    pub x_quantum: Vec<Vec<f64>>,
    pub x_classical: Vec<Vec<f64>>,
    pub rel_err_v: Vec<f64>,
    pub rel_err_x: Vec<f64>,
}

impl Trajectory {
    /// Columns `t, x_q[i]…, v_q[i]…, x_c[i]…, v_c[i]…, rel_err_x, rel_err_v`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let n = self.v_quantum.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        for prefix in ["x_q", "v_q", "x_c", "v_c"] {
            header.extend((0..n).map(|i| format!("{prefix}{i}")));
        }
        header.extend(["rel_err_x".to_string(), "rel_err_v".to_string()]);
        writeln!(out, "{}", header.join(","))?;
        for j in 0..self.times.len() {
            let mut row = vec![format!("{:?}", self.times[j])];
            for series in [&self.x_quantum, &self.v_quantum, &self.x_classical, &self.v_classical] {
                row.extend(series[j].iter().map(|x| format!("{x:e}")));
            }
            row.push(format!("{:e}", self.rel_err_x[j]));
            row.push(format!("{:e}", self.rel_err_v[j]));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_system() -> OscillatorSystem {
        OscillatorSystem::new(vec![1.0, 100.0, 2.0], vec![0.5, 0.75, 0.0], Boundary::Open).unwrap()
    }

    #[test]
    fn stiffness_of_three_mass_chain() {
        let f = build_matrices(&sample_system()).stiffness;
        let want = [[0.5, -0.5, 0.0], [-0.5, 1.25, -0.75], [0.0, -0.75, 0.75]];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((f[(i, j)] - w).abs() < 1e-15);
            }
        }
        assert_eq!(f[(3, 3)], 0.0);
    }

    #[test]
    fn uniform_closed_a_is_circulant() {
        let a = build_matrices(&OscillatorSystem::uniform(4, Boundary::Closed).unwrap()).a;
        let want = RMatrix::from_row_slice(
            4,
            4,
            &[2., -1., 0., -1., -1., 2., -1., 0., 0., -1., 2., -1., -1., 0., -1., 2.],
        );
        assert!((a - want).norm() < 1e-15);
    }

    #[test]
    fn closed_rows_sum_to_zero() {
        let sys = OscillatorSystem::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![0.1, 0.2, 0.3, 0.4, 0.5], Boundary::Closed)
            .unwrap();
        let f = build_matrices(&sys).stiffness;
        for i in 0..5 {
            assert!(f.row(i).sum().abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_consistency_is_enforced() {
        assert!(OscillatorSystem::new(vec![1.0; 3], vec![1.0; 3], Boundary::Open).is_err());
        assert!(OscillatorSystem::new(vec![1.0; 3], vec![1.0, 1.0, 0.0], Boundary::Closed).is_err());
        assert!(OscillatorSystem::new(vec![1.0, 0.0], vec![1.0], Boundary::Open).is_err());
    }

    #[test]
    fn rescale_examples() {
        let (sys, f) = rescale(&[1.0, 1.0], &[2.0, 4.0], Boundary::Closed).unwrap();
        assert_eq!(sys.springs(), &[0.5, 1.0]);
        assert_eq!(f.spring, 4.0);
        let (sys, f) = rescale(&[99999.0, 1.0, 1.0, 99999.0], &[1.0, 1.0, 1.0], Boundary::Open).unwrap();
        assert_eq!(sys.masses(), &[99999.0, 1.0, 1.0, 99999.0]);
        assert_eq!(f, ScaleFactors::IDENTITY);
    }

    #[test]
    fn zero_initial_state_is_rejected() {
        let sys = sample_system();
        let cs = ClassicalState { x: vec![0.0; 3], v: vec![0.0; 3], t: 0.0 };
        assert!(matches!(encode_initial(&sys, &build_matrices(&sys), &cs), Err(Error::ZeroState)));
    }

    #[test]
    fn encoded_velocity_half_is_zero_when_at_rest() {
        let sys = OscillatorSystem::uniform(4, Boundary::Open).unwrap();
        let cs = ClassicalState { x: vec![0.0, 0.3, 0.7, 1.0], v: vec![0.0; 4], t: 0.0 };
        let psi = encode_initial(&sys, &build_matrices(&sys), &cs).unwrap();
        assert!(psi.amplitudes[..4].iter().all(|a| a.norm() == 0.0));
        assert_eq!(psi.qubits(), 3);
    }

    #[test]
    fn rk4_normal_mode() {
        let sys = OscillatorSystem::uniform(2, Boundary::Open).unwrap();
        let cs = ClassicalState { x: vec![1.0, -1.0], v: vec![0.0; 2], t: 0.0 };
        let out = rk4_solve(&sys, &cs, &[1.0], 1e-4);
        let w = 2f64.sqrt();
        assert!((out[0].x[0] - w.cos()).abs() < 1e-8);
        assert!((out[0].x[1] + w.cos()).abs() < 1e-8);
    }

    #[test]
    fn rk4_zero_state_stays_zero() {
        let sys = sample_system();
        let cs = ClassicalState { x: vec![0.0; 3], v: vec![0.0; 3], t: 0.0 };
        let out = rk4_solve(&sys, &cs, &[0.5, 1.0], 1e-3);
        assert!(out.iter().all(|s| s.x.iter().chain(&s.v).all(|x| *x == 0.0)));
    }

    #[test]
    fn rk4_conserves_energy() {
        let sys = sample_system();
        let mats = build_matrices(&sys);
        let cs = ClassicalState { x: vec![-1.0, 0.0, 1.0], v: vec![0.2, 0.0, -0.1], t: 0.0 };
        let e0 = cs.energy(&mats);
        let out = rk4_solve(&sys, &cs, &[10.0], 1e-4);
        assert!((out[0].energy(&mats) - e0).abs() < 1e-8);
    }

    #[test]
    fn trapezoid_examples() {
        let v = vec![vec![1.0]; 3];
        assert_eq!(recover_displacement(&v, &[0.0], 0.5).unwrap(), vec![vec![0.0], vec![0.5], vec![1.0]]);
        let z = vec![vec![0.0, 0.0]; 4];
        assert!(recover_displacement(&z, &[1.0, 2.0], 0.1).unwrap().iter().all(|x| x == &vec![1.0, 2.0]));
        assert!(matches!(recover_displacement(&v[..1], &[0.0], 0.5), Err(Error::TooFewSamples)));
    }

    #[test]
    fn trapezoid_second_order() {
        // v = −sin t, x = cos t; error at t=1 shrinks ~4x when dt halves.
        let err = |dt: f64| {
            let steps = (1.0 / dt).round() as usize;
            let v: Vec<Vec<f64>> = (0..=steps).map(|j| vec![-(j as f64 * dt).sin()]).collect();
            let x = recover_displacement(&v, &[1.0], dt).unwrap();
            (x[steps][0] - 1f64.cos()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn relative_error_examples() {
        let a = vec![vec![1.0, 2.0]];
        assert_eq!(relative_error(&a, &a), vec![-12.0]);
        let b: Vec<Vec<f64>> = vec![a[0].iter().map(|x| x * (1.0 + 1e-5)).collect()];
        assert!((relative_error(&b, &a)[0] + 5.0).abs() < 1e-6);
    }
}
