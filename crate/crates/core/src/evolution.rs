//! `e^{−iHt}/4` from the cosine and sine QSVT branches on `Ĥ`.

use crate::block_encoding::BlockEncoding;
use crate::circuit::{Circuit, Gate, Polarity};
use crate::error::Result;
use crate::hamiltonian::{be_shifted, HamiltonianEncoding, ShiftedEncoding};
use crate::oscillator::EncodedState;
use crate::qsvt::{plan_degree, qsvt_sequence, solve_phases, DegreePlan, PhaseCache, PhaseSequence, TargetFunction};
use crate::statevector::StateVector;

/// Subnormalization of the evolution encoding.
pub const ALPHA_HS: f64 = 4.0;
pub const EVOLUTION_LABEL: &str = "U_HS";

#[derive(Debug, Clone)]
pub struct EvolutionEncoding {
    /// Layout `[lcu][scratch][Ĥ ancillas][signal]`.
    pub be: BlockEncoding,
    pub t: f64,
    pub tau: f64,
    pub plan: DegreePlan,
    pub cos_phases: PhaseSequence,
    pub sin_phases: PhaseSequence,
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub probability: f64,
    pub state: EncodedState,
}

pub fn be_exp(h: &HamiltonianEncoding, t: f64, epsilon: f64) -> Result<EvolutionEncoding> {
    be_exp_with(h, &be_shifted(h)?, t, epsilon, None)
}

/// As [`be_exp`], reusing a prebuilt `Ĥ` encoding and an optional phase cache.
pub fn be_exp_with(
    h: &HamiltonianEncoding,
    shifted: &ShiftedEncoding,
    t: f64,
    epsilon: f64,
    cache: Option<&PhaseCache>,
) -> Result<EvolutionEncoding> {
    let plan = plan_degree(t, epsilon, h.be.alpha)?;
    // Each halved branch gets ε/4, i.e. ε/2 before halving.
    let tol = epsilon / 4.0;
    let cos_target = TargetFunction::CosHalf { tau: plan.tau };
    let sin_target = TargetFunction::SinHalf { tau: plan.tau };
    let (cos_phases, sin_phases) = match cache {
        Some(c) => (
            c.get_or_solve(&cos_target, plan.cos_degree(), tol)?,
            c.get_or_solve(&sin_target, plan.sin_degree(), tol)?,
        ),
        None => (
            solve_phases(&cos_target, plan.cos_degree(), tol)?,
            solve_phases(&sin_target, plan.sin_degree(), tol)?,
        ),
    };
    let cos_be = qsvt_sequence(&shifted.be, &cos_phases)?;
    let sin_be = qsvt_sequence(&shifted.be, &sin_phases)?;

    let width = cos_be.width() + 1;
    let map: Vec<usize> = (1..width).collect();
    let mut c = Circuit::new(width, EVOLUTION_LABEL);
    c.push(Gate::h(0))?;
    let mut cos_branch = Circuit::new(width, cos_be.label());
    cos_branch.append_mapped(&cos_be.circuit, &map)?;
    c.append(&cos_branch.add_control(0, Polarity::Open)?)?;
    // X then Y on the scratch wire is Rz(π): −i on the block.
    let mut sin_branch = Circuit::new(width, sin_be.label());
    sin_branch.push(Gate::rz(1, std::f64::consts::PI))?;
    sin_branch.append_mapped(&sin_be.circuit, &map)?;
    c.append(&sin_branch.add_control(0, Polarity::Closed)?)?;
    c.push(Gate::h(0))?;
    c.push(Gate::rz(0, -plan.tau))?;

    let branch_error = cos_phases.achieved_error + sin_phases.achieved_error;
    let be = BlockEncoding::new(c, ALPHA_HS, cos_be.ancillas + 1, 2.0 * branch_error)?;
    Ok(EvolutionEncoding { be, t, tau: plan.tau, plan, cos_phases, sin_phases })
}

/// Runs the evolution circuit on `|0^a⟩ ⊗ ψ0` and post-selects the ancillas.
pub fn evolve_state(ev: &EvolutionEncoding, psi0: &EncodedState) -> Result<EvolutionOutcome> {
    let signal = StateVector::from_amplitudes(psi0.qubits(), psi0.amplitudes.clone())?;
    let mut state = StateVector::with_ancillas(ev.be.ancillas, &signal);
    state.apply(&ev.be.circuit)?;
    let out = state.project_ancillas(ev.be.ancillas, 0)?;
    Ok(EvolutionOutcome {
        probability: out.probability,
        state: EncodedState { amplitudes: out.post_state.amplitudes().to_vec(), norm: psi0.norm },
    })
}
