//! Quantum simulation of coupled classical oscillators.
//!
//! Circuits for block encodings of spring-mass matrices, QSVT time evolution
//! and amplitude amplification are built gate by gate, simulated on a dense
//! statevector engine, and checked against a classical RK4 reference.

pub mod amplification;
pub mod block_encoding;
pub mod circuit;
pub mod dense;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod incidence;
pub mod oscillator;
pub mod pipeline;
pub mod qsvt;
pub mod statevector;
pub mod verification;

pub use error::{Error, Result};
