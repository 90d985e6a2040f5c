//! Factor-wise kernels: applying single-mode matrices to a composite vector
//! and the eigenbasis of a truncated quadrature.

use num_complex::Complex64;

use super::ladder::single_mode_quadrature;
use super::operator::{CMatrix, HermitianEigen};
use super::space::ModeSpace;

/// Eigendecomposition `Q^θ = S diag(q) S^dag` of one truncated quadrature.
///
/// Functions of commuting quadratures are diagonal on the product of these
/// grids, which is how every conditional displacement is evaluated.
#[derive(Clone, Debug)]
pub struct QuadratureBasis {
    pub theta: f64,
    pub points: Vec<f64>,
    pub vectors: CMatrix,
}

impl QuadratureBasis {
    pub fn new(dim: usize, theta: f64) -> Self {
        let eig = HermitianEigen::new(&single_mode_quadrature(dim, theta));
        Self {
            theta,
            points: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `f(Q^θ)` as a dense single-mode matrix.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (c, &q) in self.points.iter().enumerate() {
            let w = f(q);
            for z in scaled.column_mut(c).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// In place `psi <- (I ⊗ … ⊗ m ⊗ … ⊗ I) psi`, with `m` acting on `mode`.
///
/// `psi` covers the full space (qubit factor included).
pub fn apply_mode_matrix(
    psi: &mut [Complex64],
    space: &ModeSpace,
    mode: usize,
    m: &CMatrix,
    scratch: &mut Vec<Complex64>,
) {
    let d = space.truncation_dim();
    let stride = space.mode_stride(mode);
    let block = d * stride;
    scratch.resize(d, Complex64::new(0.0, 0.0));
    for base in (0..psi.len()).step_by(block) {
        for inner in 0..stride {
            for k in 0..d {
                scratch[k] = psi[base + k * stride + inner];
            }
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += m[(r, k)] * scratch[k];
                }
                psi[base + r * stride + inner] = acc;
            }
        }
    }
}

/// Values of `Σ_n κ_n q_n` on the joint grid, in composite oscillator order.
pub fn linear_form_on_grid(bases: &[QuadratureBasis], kappa: &[f64]) -> Vec<f64> {
    let mut values = vec![0.0];
    for (basis, &k) in bases.iter().zip(kappa) {
        let mut next = Vec::with_capacity(values.len() * basis.points.len());
        for v in &values {
            for q in &basis.points {
                next.push(v + k * q);
            }
        }
        values = next;
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::operator::{embed_mode, max_abs};
    use nalgebra::DVector;

    #[test]
    fn local_application_matches_dense() {
        let space = ModeSpace::hybrid(3, 2).unwrap();
        let m = CMatrix::from_fn(3, 3, |r, c| Complex64::new(r as f64 + 0.5, c as f64 - 1.0));
        let psi = DVector::from_fn(space.dim(), |i, _| Complex64::new(i as f64, (i * i) as f64 * 0.1));
        for mode in 0..2 {
            let dense = embed_mode(space, mode, &m).unwrap();
            let expect = dense.matrix() * &psi;
            let mut got: Vec<Complex64> = psi.iter().copied().collect();
            apply_mode_matrix(&mut got, &space, mode, &m, &mut Vec::new());
            let diff = DVector::from_vec(got) - expect;
            assert!(diff.norm() < 1e-12);
        }
    }

    #[test]
    fn grid_function_reconstructs_quadrature() {
        let b = QuadratureBasis::new(16, 0.4);
        let q = b.function(|x| Complex64::new(x, 0.0));
        assert!(max_abs(&(q - single_mode_quadrature(16, 0.4))) < 1e-12);
    }
}
