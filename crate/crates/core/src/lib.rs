//! Compilation of bosonic Hamiltonians into hybrid qubit-oscillator gate
//! programs, and their verification in a truncated Fock space.
//!
//! The pipeline is: expand the potential in a Fourier series ([`fourier`]),
//! lower each harmonic to rotations and conditional displacements
//! ([`compiler`]), then run the program and compare against exact dynamics
//! ([`simulator`]). [`experiments`] wires the pieces into reproducible
//! scenarios driven by config files.

pub mod compiler;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod hilbert;
pub mod simulator;
mod text;

pub use error::{Error, Result};
