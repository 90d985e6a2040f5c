//! Ladder operators, quadratures and Pauli matrices.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::operator::{embed_mode, embed_qubit, CMatrix, Operator};
use super::space::ModeSpace;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `a` on a single mode truncated to `dim` levels: `<n-1|a|n> = sqrt(n)`.
pub fn single_mode_annihilation(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Q^θ = (a e^{-iθ} + a^dag e^{iθ}) / sqrt(2)` on a single truncated mode.
pub fn single_mode_quadrature(dim: usize, theta: f64) -> CMatrix {
    let a = single_mode_annihilation(dim);
    let phase = Complex64::from_polar(1.0, theta);
    let mut q = (&a * phase.conj() + a.adjoint() * phase) * Complex64::new(FRAC_1_SQRT_2, 0.0);
    // exact Hermitian symmetry, independent of rounding in the two products
    for r in 0..dim {
        q[(r, r)] = Complex64::new(q[(r, r)].re, 0.0);
        for c in (r + 1)..dim {
            q[(c, r)] = q[(r, c)].conj();
        }
    }
    q
}

/// Truncated `X^2 + P^2 = a a^dag + a^dag a`, the harmonic generator of one mode.
pub fn single_mode_number_generator(dim: usize) -> CMatrix {
    let x = single_mode_quadrature(dim, 0.0);
    let p = single_mode_quadrature(dim, std::f64::consts::FRAC_PI_2);
    let mut h = &x * &x + &p * &p;
    for r in 0..dim {
        for c in 0..dim {
            if r != c {
                // X^2 + P^2 is diagonal; drop rounding dust from the products
                h[(r, c)] = Complex64::new(0.0, 0.0);
            } else {
                h[(r, c)] = Complex64::new(h[(r, c)].re, 0.0);
            }
        }
    }
    h
}

pub fn annihilation_op(space: ModeSpace, mode: usize) -> Result<Operator> {
    embed_mode(space, mode, &single_mode_annihilation(space.truncation_dim()))
}

pub fn quadrature_op(space: ModeSpace, mode: usize, theta: f64) -> Result<Operator> {
    if !theta.is_finite() {
        return Err(Error::NonFinite(format!("quadrature angle {theta}")));
    }
    let op = embed_mode(space, mode, &single_mode_quadrature(space.truncation_dim(), theta))?;
    Operator::hermitian(space, op.into_matrix())
}

pub fn position_op(space: ModeSpace, mode: usize) -> Result<Operator> {
    quadrature_op(space, mode, 0.0)
}

pub fn momentum_op(space: ModeSpace, mode: usize) -> Result<Operator> {
    quadrature_op(space, mode, std::f64::consts::FRAC_PI_2)
}

pub fn sigma_x() -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[zero, one, one, zero])
}

pub fn sigma_y() -> CMatrix {
    let zero = Complex64::new(0.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[zero, -I, I, zero])
}

pub fn sigma_z() -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one])
}

/// Pauli matrix lifted onto `space` (requires a qubit factor).
pub fn qubit_op(space: ModeSpace, pauli: &CMatrix) -> Result<Operator> {
    let op = embed_qubit(space, pauli)?;
    Operator::hermitian(space, op.into_matrix())
}
