//! Lowering of Fourier series to hybrid gate programs.
//!
//! Each harmonic `A cos(μ·Q)` or `B sin(μ·Q)` of the potential becomes a
//! qubit-dressed trigonometric gate built from two-step QSP blocks
//!
//! ```text
//! 𝒰(ϑ, κ) = W_x(κ) e^{iϑσ_z} W_x(κ)^dag = exp(iϑ(σ_z cos 2κ·Q + σ_y sin 2κ·Q))
//! ```
//!
//! with `ϑ = -Λ/2`, `κ = μ/2`. On `|↑⟩` the gate acts, to second order in
//! `ϑ`, as `exp(-iΛ cos(μ·Q))` (or `sin`). A Trotter step is the free
//! evolution under `H_0` followed by all trig gates.
//!
//! Instruction lists are in time order: the first instruction acts first.

mod fuse;
mod ir;
mod qsp;
mod resources;
mod trotter;

pub use fuse::fuse_displacements;
pub use ir::{GateInstruction, GateProgram, ProgramMetadata, Splitting, HADAMARD_NORMALIZATION};
pub use qsp::{compile_qsp_block, compile_trig_gate, TrigGateParams, TrigKind};
pub use resources::{resource_estimate, NativeModel, ResourceReport};
pub use trotter::{
    compile_program, compile_series_program, compile_trotter_step, trig_gate_params,
    CompileOptions, ThetaGuard, THETA_WARN,
};
