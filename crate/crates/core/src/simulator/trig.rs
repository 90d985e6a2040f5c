use num_complex::Complex64;

use super::gates::free_phases;
use super::hamiltonian::grid_values;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::hilbert::{apply_mode_matrix, QuadratureBasis, StateVector};

/// Runs `r` steps of free evolution followed by the exact oscillator-only
/// trig gates `exp(-iΛ cos(μ·Q))`, `exp(-iΛ sin(μ·Q))` of `series`.
///
/// This bypasses the qubit entirely, so comparing it with a compiled program
/// isolates the error of the QSP construction from the Trotter error.
pub fn run_exact_trig_gates(
    series: &FourierSeries,
    frequencies: &[f64],
    dt: f64,
    repetitions: usize,
    initial: &StateVector,
) -> Result<StateVector> {
    let space = initial.space();
    if space.qubit_present() {
        return Err(Error::InvalidParameter("exact trig route takes an oscillator-only state".into()));
    }
    if space.num_modes() != series.num_modes() || frequencies.len() != series.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: space.num_modes(),
            actual: series.num_modes(),
        });
    }
    let d = space.truncation_dim();
    let bases: Vec<QuadratureBasis> = series.angles().iter().map(|&t| QuadratureBasis::new(d, t)).collect();
    let adjoints: Vec<_> = bases.iter().map(|b| b.vectors.adjoint()).collect();
    // All trig gates of a step commute, so their product is one grid phase.
    let phases: Vec<Complex64> = grid_values(&bases, |q| series.evaluate_dynamic(q))?
        .into_iter()
        .map(|v| Complex64::from_polar(1.0, -v * dt))
        .collect();
    let mut free = vec![Complex64::new(1.0, 0.0)];
    for &w in frequencies {
        let p = free_phases(d, dt, w);
        free = free.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
    }
    let mut psi: Vec<Complex64> = initial.amplitudes().iter().copied().collect();
    let mut scratch = Vec::new();
    for _ in 0..repetitions {
        for (z, p) in psi.iter_mut().zip(&free) {
            *z *= p;
        }
        for (n, s) in adjoints.iter().enumerate() {
            apply_mode_matrix(&mut psi, &space, n, s, &mut scratch);
        }
        for (z, p) in psi.iter_mut().zip(&phases) {
            *z *= p;
        }
        for (n, b) in bases.iter().enumerate() {
            apply_mode_matrix(&mut psi, &space, n, &b.vectors, &mut scratch);
        }
    }
    StateVector::normalize(space, nalgebra::DVector::from_vec(psi))
}
