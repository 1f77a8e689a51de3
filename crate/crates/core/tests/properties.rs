use num_complex::Complex64;
use proptest::prelude::*;

use oscsim::amplification::state_preparation;
use oscsim::circuit::{Circuit, Control, Gate};
use oscsim::dense::{expm_hermitian, hermitian_function, spectral_norm, CMatrix};
use oscsim::evolution::{be_exp, ALPHA_HS};
use oscsim::hamiltonian::{be_hamiltonian, be_shifted, hamiltonian_matrix, shifted_matrix};
use oscsim::incidence::be_b;
use oscsim::oscillator::{build_matrices, rescale, Boundary, OscillatorSystem};
use oscsim::pipeline::{run, SimulationConfig};
use oscsim::qsvt::{phis_from_varphis, qsvt_sequence, solve_phases, varphis_from_phis, TargetFunction};
use oscsim::statevector::{circuit_matrix, StateVector};

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Open), Just(Boundary::Closed)]
}

/// Random chain with up to `max_n` oscillators, rescaled into the valid range.
fn system(max_n: usize) -> impl Strategy<Value = OscillatorSystem> {
    (2..=max_n, boundary()).prop_flat_map(|(n, b)| {
        let count = if b == Boundary::Open { n - 1 } else { n };
        (prop::collection::vec(0.2..10.0f64, n), prop::collection::vec(0.05..3.0f64, count))
            .prop_map(move |(m, k)| rescale(&m, &k, b).expect("valid").0)
    })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_gate(width: usize) -> impl Strategy<Value = Gate> {
    (0..width, 0..8usize, -3.0..3.0f64, prop::collection::vec(any::<bool>(), width)).prop_map(
        move |(target, kind, angle, mask)| {
            let other = (target + 1) % width;
            let base = match kind {
                0 => Gate::x(target),
                1 => Gate::z(target),
                2 => Gate::h(target),
                3 => Gate::ry(target, angle),
                4 => Gate::rz(target, angle),
                5 if width > 1 => Gate::swap(target, other),
                _ => Gate::ry(target, -angle),
            };
            let busy: Vec<usize> = base.qubits().collect();
            let controls = (0..width)
                .filter(|q| !busy.contains(q) && mask[*q])
                .map(|q| if q % 2 == 0 { Control::closed(q) } else { Control::open(q) });
            base.with_controls(controls)
        },
    )
}

fn random_circuit() -> impl Strategy<Value = Circuit> {
    (1..=4usize).prop_flat_map(|width| {
        prop::collection::vec(random_gate(width), 0..24).prop_map(move |gates| {
            let mut circ = Circuit::new(width, "rand");
            gates.into_iter().for_each(|g| circ.push(g).expect("in range"));
            circ
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_systems_encode_exactly(sys in system(8)) {
        let b = build_matrices(&sys).b;
        let h = be_hamiltonian(&be_b(&sys).unwrap()).unwrap();
        let dense = hamiltonian_matrix(&b);
        prop_assert!(h.be.verify(&dense).unwrap() <= 1e-9);
        let shifted = be_shifted(&h).unwrap();
        prop_assert!(shifted.be.verify(&shifted_matrix(&dense, h.be.alpha)).unwrap() <= 1e-9);
    }

    #[test]
    fn gates_preserve_norm_and_dagger_inverts(circ in random_circuit()) {
        let u = circuit_matrix(&circ);
        let n = u.nrows();
        prop_assert!((u.adjoint() * &u - CMatrix::identity(n, n)).norm() < 1e-10);
        let round = circuit_matrix(&{
            let mut both = circ.clone();
            both.append(&circ.dagger()).unwrap();
            both
        });
        prop_assert!((round - CMatrix::identity(n, n)).norm() < 1e-10);
    }

    #[test]
    fn circuit_text_round_trips(circ in random_circuit()) {
        let parsed = Circuit::from_text(&circ.to_text()).unwrap();
        prop_assert!((circuit_matrix(&parsed) - circuit_matrix(&circ)).norm() < 1e-12);
    }

    #[test]
    fn state_preparation_reaches_target(raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)) {
        let amps: Vec<Complex64> = raw.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let mut s = StateVector::zero(3);
        s.apply(&state_preparation(&amps).unwrap()).unwrap();
        for (got, want) in s.amplitudes().iter().zip(&amps) {
            prop_assert!((got - want / norm).norm() < 1e-12);
        }
    }

    #[test]
    fn varphi_offsets_are_a_bijection(phis in prop::collection::vec(-4.0..4.0f64, 1..30)) {
        let back = phis_from_varphis(&varphis_from_phis(&phis));
        for (a, b) in back.iter().zip(&phis) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn qsvt_block_commutes_with_shifted_hamiltonian(sys in system(4), tau in 0.5..6.0f64) {
        let h = be_hamiltonian(&be_b(&sys).unwrap()).unwrap();
        let shifted = be_shifted(&h).unwrap();
        let target = TargetFunction::CosHalf { tau };
        let degree = 2 * ((1.4 * tau + 100f64.ln()).ceil() as usize / 2 + 1);
        let ps = solve_phases(&target, degree, 1e-3).unwrap();
        let p = qsvt_sequence(&shifted.be, &ps).unwrap().block();
        let hhat = shifted_matrix(&hamiltonian_matrix(&build_matrices(&sys).b), h.be.alpha);
        prop_assert!((&p * &hhat - &hhat * &p).norm() < 1e-8);
    }

    /// `Γ = Z` on the selector anticommutes with `H`, so even polynomials of
    /// `H` commute with `Γ` and odd ones anticommute.
    #[test]
    fn chiral_symmetry(
        masses in prop::collection::vec(0.5..4.0f64, 2),
        spring in 0.1..2.0f64,
        odd in any::<bool>(),
        raw in prop::collection::vec(-1.0..1.0f64, 3),
    ) {
        let sys = rescale(&masses, &[spring], Boundary::Open).unwrap().0;
        let h = be_hamiltonian(&be_b(&sys).unwrap()).unwrap();
        let parity = usize::from(odd);
        let mut coeffs = vec![0.0; 5 + parity];
        for (j, r) in raw.iter().enumerate() {
            coeffs[2 * j + parity] = *r;
        }
        let scale = 0.45 / coeffs.iter().map(|x| x.abs()).sum::<f64>().max(1e-3);
        coeffs.iter_mut().for_each(|x| *x *= scale);
        let target = TargetFunction::Chebyshev { coeffs };
        let ps = solve_phases(&target, 4 + parity, 1e-9).unwrap();
        let p = qsvt_sequence(&h.be, &ps).unwrap().block();

        let dense = hamiltonian_matrix(&build_matrices(&sys).b) / c(h.be.alpha);
        let expected = hermitian_function(&dense, |x| c(target.eval(x)));
        prop_assert!(spectral_norm(&(&p - expected)) < 1e-8);

        let gamma = CMatrix::from_fn(4, 4, |r, col| if r == col { c(if r < 2 { 1.0 } else { -1.0 }) } else { c(0.0) });
        let sign = if odd { -1.0 } else { 1.0 };
        prop_assert!((&gamma * &p * &gamma - &p * c(sign)).norm() < 1e-8);
    }

    #[test]
    fn evolution_composes(t1 in 0.05..0.6f64, t2 in 0.05..0.6f64) {
        let sys = OscillatorSystem::uniform(4, Boundary::Closed).unwrap();
        let h = be_hamiltonian(&be_b(&sys).unwrap()).unwrap();
        let eps = 0.01;
        let block = |t: f64| be_exp(&h, t, eps).unwrap().be.block() * c(ALPHA_HS);
        let composed = block(t1) * block(t2);
        let direct = block(t1 + t2);
        let dense = expm_hermitian(&hamiltonian_matrix(&build_matrices(&sys).b), t1 + t2);
        prop_assert!(spectral_norm(&(&composed - &direct)) <= 3.0 * eps + eps * eps);
        prop_assert!(spectral_norm(&(composed - dense)) <= 2.0 * eps + eps * eps);
    }
}

#[test]
fn runs_are_deterministic_across_worker_counts() {
    let text = r#"{
        "system": { "n": 3, "masses": [1.0, 3.0, 2.0], "springs": [0.5, 0.8], "boundary": "open" },
        "x0": [0.4, -0.2, 0.1], "v0": [0.0, 0.1, 0.0],
        "t_f": 1.0, "dt": 0.5
    }"#;
    let serial = SimulationConfig { workers: Some(1), ..SimulationConfig::from_json(text).unwrap() };
    let parallel = SimulationConfig { workers: Some(3), ..serial.clone() };
    let a = run(&serial).unwrap();
    let b = run(&parallel).unwrap();
    let again = run(&serial).unwrap();
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.trajectory, again.trajectory);
}
