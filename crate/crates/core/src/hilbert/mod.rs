//! Truncated Fock-space linear algebra.
//!
//! Every mode keeps `truncation_dim` Fock levels and an optional qubit sits in
//! front of the modes. Operators are dense; exponentials of Hermitian
//! generators go through an eigendecomposition so that functions of the
//! truncated quadratures (including displacements) are all evaluated on the
//! same footing.

mod ladder;
mod local;
mod operator;
mod space;
mod state;

pub use ladder::{
    annihilation_op, momentum_op, position_op, quadrature_op, qubit_op, sigma_x, sigma_y, sigma_z,
    single_mode_annihilation, single_mode_number_generator, single_mode_quadrature,
};
pub use local::{apply_mode_matrix, linear_form_on_grid, QuadratureBasis};
pub use operator::{
    embed_mode, embed_qubit, hermitian_expm, hermiticity_defect, max_abs, operator_norm, tensor,
    unitarity_defect, CMatrix, Factor, HermitianEigen, Operator, HERMITIAN_TOL,
};
pub use space::ModeSpace;
pub use state::{
    coherent_state, fidelity, fock_population, single_mode_coherent, CVector, Qubit, StateVector,
    DEFAULT_LEAKAGE_BUFFER, NORM_TOL,
};
