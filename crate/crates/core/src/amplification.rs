//! Reflections, the Grover iteration and the amplification schedule.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::block_encoding::{bitstring_controls, real_amplitude_tree};
use crate::circuit::{Circuit, Control, Gate};
use crate::error::{Error, Result};
use crate::evolution::EvolutionEncoding;
use crate::oscillator::EncodedState;
use crate::statevector::StateVector;

/// Default minimum post-amplification success probability.
pub const SUCCESS_FLOOR: f64 = 0.5;
pub const GROVER_LABEL: &str = "W";

/// How the number of Grover iterations is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase", tag = "mode", content = "iterations")]
pub enum RoaaMode {
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoaaSchedule {
    pub amplitude: f64,
    pub iterations: usize,
    pub predicted_success: f64,
}

impl RoaaSchedule {
    /// Queries to the evolution encoding, counting the initial application.
    pub fn queries(&self) -> usize {
        2 * self.iterations + 1
    }
}

#[derive(Debug, Clone)]
pub struct AmplifiedOutcome {
    pub pre_probability: f64,
    pub probability: f64,
    pub predicted_success: f64,
    pub state: EncodedState,
}

/// `I − 2|0^m⟩⟨0^m|`.
pub fn reflection_zero(m: usize) -> Circuit {
    let mut c = Circuit::new(m.max(1), "R0");
    for q in 0..m {
        c.push(Gate::x(q)).expect("in range");
    }
    c.push(Gate::z(m - 1).with_controls((0..m - 1).map(Control::closed))).expect("in range");
    for q in 0..m {
        c.push(Gate::x(q)).expect("in range");
    }
    c
}

/// Prepares a normalized complex state from `|0…0⟩`: an Ry tree for the
/// magnitudes followed by a diagonal Rz tree for the phases.
pub fn state_preparation(amplitudes: &[Complex64]) -> Result<Circuit> {
    let len = amplitudes.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let n = len.trailing_zeros() as usize;
    let magnitudes: Vec<f64> = amplitudes.iter().map(|a| a.norm() / norm).collect();
    let mut c = real_amplitude_tree(&magnitudes, "S")?;
    let mut phases: Vec<f64> = amplitudes.iter().map(|a| if a.norm() == 0.0 { 0.0 } else { a.arg() }).collect();
    for level in (0..n).rev() {
        let half: Vec<f64> = phases.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        for (prefix, pair) in phases.chunks(2).enumerate() {
            let delta = pair[1] - pair[0];
            if delta.abs() > 1e-15 {
                c.push(Gate::rz(level, delta).with_controls(bitstring_controls(prefix, 0, level)))?;
            }
        }
        phases = half;
    }
    c.global_phase = phases[0];
    Ok(c)
}

/// `W = −U R_Ψ0 U† R_Ψg` with `R_Ψ0 = (I⊗S) R_0 (I⊗S†)` and `R_Ψg = R_0(a) ⊗ I`.
pub fn grover_iteration(ev: &EvolutionEncoding, prep: &Circuit) -> Result<Circuit> {
    let width = ev.be.width();
    let a = ev.be.ancillas;
    if prep.width + a != width {
        return Err(Error::WidthMismatch { expected: width - a, got: prep.width });
    }
    let anc: Vec<usize> = (0..a).collect();
    let sig: Vec<usize> = (a..width).collect();
    let all: Vec<usize> = (0..width).collect();
    let mut w = Circuit::new(width, GROVER_LABEL);
    w.append_mapped(&reflection_zero(a), &anc)?;
    w.append_call(&ev.be.circuit.dagger(), &all)?;
    w.append_mapped(&prep.dagger(), &sig)?;
    w.append_mapped(&reflection_zero(width), &all)?;
    w.append_mapped(prep, &sig)?;
    w.append_call(&ev.be.circuit, &all)?;
    w.global_phase += PI;
    Ok(w)
}

fn success(q: usize, theta: f64) -> f64 {
    ((2 * q + 1) as f64 * theta).sin().powi(2)
}

/// Picks the iteration count maximizing `sin²((2q+1)·asin(a))` among the
/// neighbours of the continuous optimum and zero.
pub fn schedule(alpha_hs: f64, psi0_norm: f64) -> Result<RoaaSchedule> {
    let amplitude = psi0_norm / alpha_hs;
    if !(amplitude > 0.0 && amplitude <= 1.0) {
        return Err(Error::ZeroState);
    }
    let theta = amplitude.asin();
    let ideal = PI / (4.0 * theta) - 0.5;
    let candidates = [ideal.floor().max(0.0) as usize, ideal.ceil().max(0.0) as usize, 0];
    let iterations = candidates
        .into_iter()
        .max_by(|&p, &q| success(p, theta).total_cmp(&success(q, theta)).then(q.cmp(&p)))
        .expect("non-empty");
    Ok(RoaaSchedule { amplitude, iterations, predicted_success: success(iterations, theta) })
}

/// Schedule with a prescribed iteration count.
pub fn fixed_schedule(alpha_hs: f64, psi0_norm: f64, iterations: usize) -> Result<RoaaSchedule> {
    let auto = schedule(alpha_hs, psi0_norm)?;
    let theta = auto.amplitude.asin();
    Ok(RoaaSchedule { iterations, predicted_success: success(iterations, theta), ..auto })
}

pub fn schedule_for(mode: RoaaMode, alpha_hs: f64, psi0_norm: f64) -> Result<RoaaSchedule> {
    match mode {
        RoaaMode::Auto => schedule(alpha_hs, psi0_norm),
        RoaaMode::Fixed(q) => fixed_schedule(alpha_hs, psi0_norm, q),
    }
}

/// Prepares `|0^a⟩ ⊗ ψ0`, applies `U`, then `Q_W` Grover iterations, and
/// post-selects the ancillas on `|0^a⟩`.
pub fn amplify_and_measure(
    ev: &EvolutionEncoding,
    prep: &Circuit,
    sched: &RoaaSchedule,
    floor: f64,
    psi0_norm: f64,
) -> Result<AmplifiedOutcome> {
    let a = ev.be.ancillas;
    let mut state = StateVector::zero(ev.be.width());
    let sig: Vec<usize> = (a..ev.be.width()).collect();
    let mut lifted = Circuit::new(ev.be.width(), "S");
    lifted.append_mapped(prep, &sig)?;
    state.apply(&lifted)?;
    state.apply(&ev.be.circuit)?;
    let pre_probability = state.project_ancillas(a, 0)?.probability;
    if sched.iterations > 0 {
        let w = grover_iteration(ev, prep)?;
        for _ in 0..sched.iterations {
            state.apply(&w)?;
        }
    }
    let out = state.project_ancillas(a, 0)?;
    if out.probability < floor {
        return Err(Error::LowSuccess { probability: out.probability, floor });
    }
    Ok(AmplifiedOutcome {
        pre_probability,
        probability: out.probability,
        predicted_success: sched.predicted_success,
        state: EncodedState { amplitudes: out.post_state.amplitudes().to_vec(), norm: psi0_norm },
    })
}
