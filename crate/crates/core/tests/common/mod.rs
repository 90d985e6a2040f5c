//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use bosonic_synth::compiler::{GateInstruction, GateProgram, ProgramMetadata, Splitting};
use bosonic_synth::hilbert::{CMatrix, ModeSpace};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub const BUFFER: usize = 8;

/// Truncated position matrix built from its Fock-basis matrix elements.
pub fn position(d: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(d, d);
    for n in 1..d {
        let v = (n as f64 / 2.0).sqrt();
        x[(n - 1, n)] = v;
        x[(n, n - 1)] = v;
    }
    x
}

/// `f(X)` through a real symmetric eigendecomposition of the truncated position.
pub fn function_of_x(d: usize, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let eig = position(d).symmetric_eigen();
    let v = eig.eigenvectors.map(|a| Complex64::new(a, 0.0));
    let diag = CMatrix::from_diagonal(&eig.eigenvalues.map(&f));
    &v * diag * v.adjoint()
}

/// Block matrix `[[a, b], [c, e]]` in the qubit ⊗ mode ordering (`|↑⟩` first).
pub fn qubit_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, e: &CMatrix) -> CMatrix {
    let d = a.nrows();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(a);
    m.view_mut((0, d), (d, d)).copy_from(b);
    m.view_mut((d, 0), (d, d)).copy_from(c);
    m.view_mut((d, d), (d, d)).copy_from(e);
    m
}

/// `exp(iϑ(σ_z cos 2κX + σ_y sin 2κX))`, using that the generator squares to one.
pub fn qsp_target(d: usize, theta: f64, kappa: f64) -> CMatrix {
    let c = function_of_x(d, |x| Complex64::new((2.0 * kappa * x).cos(), 0.0));
    let s = function_of_x(d, |x| Complex64::new((2.0 * kappa * x).sin(), 0.0));
    let i = Complex64::new(0.0, 1.0);
    // σ_y = [[0, -i], [i, 0]]
    let g = qubit_blocks(&c, &(&s * -i), &(&s * i), &(-&c));
    CMatrix::identity(2 * d, 2 * d) * Complex64::new(theta.cos(), 0.0) + g * (i * theta.sin())
}

/// `exp(2iϑ σ_z f(2κX))` for `f = cos` or `sin`.
pub fn trig_target(d: usize, theta: f64, kappa: f64, f: fn(f64) -> f64) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    let up = function_of_x(d, |x| (i * 2.0 * theta * f(2.0 * kappa * x)).exp());
    let down = function_of_x(d, |x| (-i * 2.0 * theta * f(2.0 * kappa * x)).exp());
    let z = CMatrix::zeros(d, d);
    qubit_blocks(&up, &z, &z, &down)
}

/// Indices of basis states with every mode below `d - BUFFER`.
pub fn interior_indices(space: ModeSpace) -> Vec<usize> {
    let d = space.truncation_dim();
    let od = space.oscillator_dim();
    (0..space.dim())
        .filter(|&i| {
            let mut rest = i % od;
            (0..space.num_modes()).all(|_| {
                let ok = rest % d < d - BUFFER;
                rest /= d;
                ok
            })
        })
        .collect()
}

/// Operator norm of `m` restricted to interior-supported input states.
pub fn interior_norm(m: &CMatrix, space: ModeSpace) -> f64 {
    let cols = interior_indices(space);
    let sub = CMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])]);
    sub.svd(false, false).singular_values.max()
}

pub fn program(space: ModeSpace, step: Vec<GateInstruction>) -> GateProgram {
    let meta = ProgramMetadata {
        max_order: 0,
        dt: 0.0,
        splitting: Splitting::LieTrotter,
        hamiltonian_digest: String::new(),
        fused: false,
    };
    GateProgram::new(space, step, 1, false, meta).unwrap()
}
