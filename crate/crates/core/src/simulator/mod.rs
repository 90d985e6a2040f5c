//! Execution of gate programs on `qubit ⊗ modes` and exact reference dynamics.
//!
//! [`run_program`] precomputes the step operator once in factored form and
//! applies it `r` times. The reference side diagonalizes the full truncated
//! Hamiltonian once and evolves to any requested time.

mod engine;
mod exact;
mod gates;
mod hamiltonian;
mod report;
mod run;
mod trig;

pub use engine::CompiledStep;
pub use exact::{exact_reference, ExactPropagator, ExactState, DEFAULT_LEAKAGE_THRESHOLD};
pub use gates::{gate_matrix, step_matrix};
pub use hamiltonian::HamiltonianSpec;
pub use report::{GateCounts, RunReport, StepRecord};
pub use run::{
    infidelity_sweep, run_program, RunOptions, Schedule, SweepRow, DEFAULT_SAMPLES,
    DEFAULT_SUCCESS_FLOOR,
};
pub use trig::run_exact_trig_gates;
