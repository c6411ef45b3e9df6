//! Circuit-QED simulation toolkit: transmon-resonator Hamiltonians,
//! Jaynes-Cummings analytics, Lindblad dynamics and dispersive readout.
//!
//! Conventions used throughout:
//! - ℏ = 1, frequencies and rates in rad/ns, times in ns;
//! - composite spaces are ordered cavity ⊗ qubit;
//! - qubit |0⟩ = ground, |1⟩ = excited, σ_z = |0⟩⟨0| − |1⟩⟨1|.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod integrate;
pub mod jc;
pub mod operator;
pub mod readout;
mod sparse;
pub mod units;

pub use error::{Error, Result};
pub use hamiltonian::{Coefficient, Envelope, HamiltonianSpec};
pub use integrate::TimeGrid;
pub use operator::{Dims, Operator, QuantumState, C64};
