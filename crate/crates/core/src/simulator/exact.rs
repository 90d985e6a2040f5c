use log::warn;
use nalgebra::DVector;
use num_complex::Complex64;

use super::hamiltonian::HamiltonianSpec;
use crate::error::{Error, Result};
use crate::hilbert::{CVector, HermitianEigen, ModeSpace, StateVector, DEFAULT_LEAKAGE_BUFFER};

/// Leakage above which a reference state is marked untrusted.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-8;

/// Eigendecomposition of the truncated Hamiltonian, reused for any number of times.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    space: ModeSpace,
    eigen: HermitianEigen,
}

/// Reference state together with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct ExactState {
    pub state: StateVector,
    pub leakage: f64,
    pub trusted: bool,
}

impl ExactPropagator {
    pub fn new(ham: &HamiltonianSpec, space: &ModeSpace) -> Result<Self> {
        let h = ham.matrix(space)?;
        Ok(Self {
            space: space.without_qubit(),
            eigen: HermitianEigen::new(h.matrix()),
        })
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    /// Sorted eigenvalues of the truncated Hamiltonian.
    pub fn energies(&self) -> &DVector<f64> {
        &self.eigen.eigenvalues
    }

    pub fn eigenvectors(&self) -> &crate::hilbert::CMatrix {
        &self.eigen.eigenvectors
    }

    /// Coordinates of an oscillator-only state in the eigenbasis.
    pub fn project(&self, initial: &StateVector) -> Result<CVector> {
        let osc = strip_qubit(initial)?;
        if osc.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: osc.space().dim(),
            });
        }
        Ok(self.eigen.eigenvectors.adjoint() * osc.amplitudes())
    }

    /// `exp(-iHt)` applied to a state given by its eigenbasis coordinates.
    pub fn evolve_projected(&self, coords: &CVector, t: f64) -> CVector {
        let phased = CVector::from_iterator(
            coords.len(),
            coords
                .iter()
                .zip(self.eigen.eigenvalues.iter())
                .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        &self.eigen.eigenvectors * phased
    }

    pub fn evolve(&self, initial: &StateVector, t: f64) -> Result<ExactState> {
        let coords = self.project(initial)?;
        self.finish(self.evolve_projected(&coords, t), DEFAULT_LEAKAGE_THRESHOLD)
    }

    pub(crate) fn finish(&self, amps: CVector, threshold: f64) -> Result<ExactState> {
        let state = StateVector::normalize(self.space, amps)?;
        let leakage = state.leakage(DEFAULT_LEAKAGE_BUFFER);
        let trusted = leakage <= threshold;
        if !trusted {
            warn!("exact reference leakage {leakage:e} exceeds {threshold:e}; result is untrusted");
        }
        Ok(ExactState {
            state,
            leakage,
            trusted,
        })
    }
}

/// Oscillator part of `state`; hybrid states must have no `|↓⟩` component.
pub(crate) fn strip_qubit(state: &StateVector) -> Result<StateVector> {
    if !state.space().qubit_present() {
        return Ok(state.clone());
    }
    let down = state.qubit_component(crate::hilbert::Qubit::Down)?;
    if down.norm() > 1e-12 {
        return Err(Error::InvalidParameter(
            "reference dynamics needs the qubit in |up> or no qubit".into(),
        ));
    }
    let up = state.qubit_component(crate::hilbert::Qubit::Up)?;
    StateVector::normalize(up.space(), up.into_amplitudes())
}

/// `exp(-iHT)|ψ⟩` on the truncated space.
pub fn exact_reference(ham: &HamiltonianSpec, t: f64, initial: &StateVector) -> Result<ExactState> {
    if !t.is_finite() {
        return Err(Error::NonFinite("reference time".into()));
    }
    ExactPropagator::new(ham, &initial.space())?.evolve(initial, t)
}
