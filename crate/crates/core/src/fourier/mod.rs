//! Fourier expansion of potentials on a box.
//!
//! A potential `V(q)` on `⨉[-L_n/2, L_n/2]` is written as
//! `A_0 + Σ A_μ cos(μ·q) + B_μ sin(μ·q)` with `μ_n = m_n 2π/L_n`. Each `±m`
//! pair is stored once, under the representative whose first non-zero entry
//! is positive, so mixed-sign harmonics like `sin(x_1 - x_2)` are kept
//! separate from `sin(x_1 + x_2)`.
//!
//! Two coefficient engines are provided: a Gauss-Legendre product rule for
//! arbitrary potentials and an exact closed form for polynomials.

mod polynomial;
mod potential;
mod quadrature;
mod series;

pub use polynomial::{coefficients_polynomial, polynomial_grid};
pub use potential::{default_domain_length, Monomial, PotentialFn, PotentialForm, PotentialSpec};
pub use quadrature::{coefficients_quadrature, default_points_per_dim, quadrature_grid};
pub use series::{
    canonical_indices, reconstruction_error, CoefficientGrid, FourierSeries, FourierTerm,
    ReconstructionError, DEFAULT_PRUNE_THRESHOLD,
};

/// Polynomial route when available, quadrature otherwise.
pub fn coefficients(spec: &PotentialSpec, max_order: usize) -> crate::Result<FourierSeries> {
    match spec.form() {
        PotentialForm::Polynomial(_) => coefficients_polynomial(spec, max_order),
        PotentialForm::Callable(_) => {
            coefficients_quadrature(spec, max_order, default_points_per_dim(max_order))
        }
    }
}
