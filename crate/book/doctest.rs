//! Every chapter of the guide is included as module docs, so `cargo test`
//! runs its code listings as doctests.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/hilbert.md")]
pub mod hilbert {}
#[doc = include_str!("src/fourier.md")]
pub mod fourier {}
#[doc = include_str!("src/compiler.md")]
pub mod compiler {}
#[doc = include_str!("src/simulator.md")]
pub mod simulator {}
#[doc = include_str!("src/experiments.md")]
pub mod experiments {}
