use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::compiler::{GateInstruction, GateProgram};
use crate::error::{Error, Result};
use crate::hilbert::{
    embed_qubit, sigma_y, sigma_z, single_mode_number_generator, tensor, CMatrix, Factor,
    ModeSpace, Operator, QuadratureBasis,
};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major 2x2 qubit matrix.
pub(crate) type Block = [Complex64; 4];

pub(crate) const IDENTITY_BLOCK: Block = [ONE, ZERO, ZERO, ONE];

pub(crate) fn block_mul(a: &Block, b: &Block) -> Block {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

pub(crate) fn rotation_block(angle: f64) -> Block {
    [Complex64::from_polar(1.0, angle), ZERO, ZERO, Complex64::from_polar(1.0, -angle)]
}

/// `(σ_y + σ_z)/√2`.
pub(crate) fn hadamard_block() -> Block {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [s, -I * s, I * s, -s]
}

/// `exp(i y σ_x)`.
pub(crate) fn displacement_block(y: f64) -> Block {
    let (s, c) = y.sin_cos();
    [Complex64::new(c, 0.0), I * s, I * s, Complex64::new(c, 0.0)]
}

/// Diagonal of `exp(-i t ω/2 (X² + P²))` for one mode.
pub(crate) fn free_phases(dim: usize, duration: f64, omega: f64) -> Vec<Complex64> {
    let g = single_mode_number_generator(dim);
    (0..dim)
        .map(|k| Complex64::from_polar(1.0, -duration * omega / 2.0 * g[(k, k)].re))
        .collect()
}

fn block_matrix(b: &Block) -> CMatrix {
    CMatrix::from_row_slice(2, 2, b)
}

fn check_vectors(space: &ModeSpace, inst: &GateInstruction) -> Result<()> {
    let n = space.num_modes();
    let lens: Vec<usize> = match inst {
        GateInstruction::ConditionalDisplacement { kappa, angles } => vec![kappa.len(), angles.len()],
        GateInstruction::FreeEvolution { frequencies, .. } => vec![frequencies.len()],
        _ => vec![],
    };
    match lens.into_iter().find(|&l| l != n) {
        Some(actual) => Err(Error::DimensionMismatch { expected: n, actual }),
        None => Ok(()),
    }
}

/// Dense matrix of one instruction on `space`.
///
/// Qubit gates need a qubit in `space`. `PostSelectUp` has no matrix.
pub fn gate_matrix(inst: &GateInstruction, space: ModeSpace) -> Result<Operator> {
    check_vectors(&space, inst)?;
    let d = space.truncation_dim();
    match inst {
        GateInstruction::RotationZ { angle } => embed_qubit(space, &block_matrix(&rotation_block(*angle))),
        GateInstruction::HadamardYZ => {
            let h = (sigma_y() + sigma_z()) * Complex64::new(FRAC_1_SQRT_2, 0.0);
            embed_qubit(space, &h)
        }
        GateInstruction::ConditionalDisplacement { kappa, angles } => {
            if !space.qubit_present() {
                return Err(Error::InvalidParameter("conditional displacement needs a qubit".into()));
            }
            let mut acc = CMatrix::identity(space.dim(), space.dim());
            for (n, (&k, &theta)) in kappa.iter().zip(angles).enumerate() {
                if k == 0.0 {
                    continue;
                }
                let basis = QuadratureBasis::new(d, theta);
                let cos = basis.function(|q| Complex64::new((k * q).cos(), 0.0));
                let isin = basis.function(|q| I * (k * q).sin());
                let mode_factors = |m: &CMatrix| -> Vec<CMatrix> {
                    (0..space.num_modes())
                        .map(|j| if j == n { m.clone() } else { CMatrix::identity(d, d) })
                        .collect()
                };
                let id2 = CMatrix::identity(2, 2);
                let sx = crate::hilbert::sigma_x();
                let build = |q: &CMatrix, m: &CMatrix| -> Result<CMatrix> {
                    let mats = mode_factors(m);
                    let mut factors = vec![Factor::Matrix(q)];
                    factors.extend(mats.iter().map(Factor::Matrix));
                    Ok(tensor(space, &factors)?.into_matrix())
                };
                let factor = build(&id2, &cos)? + build(&sx, &isin)?;
                acc = factor * acc;
            }
            Operator::new(space, acc)
        }
        GateInstruction::FreeEvolution {
            duration,
            frequencies,
        } => {
            let diags: Vec<CMatrix> = frequencies
                .iter()
                .map(|&w| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(free_phases(d, *duration, w))))
                .collect();
            let mut factors = Vec::new();
            if space.qubit_present() {
                factors.push(Factor::Identity(2));
            }
            factors.extend(diags.iter().map(Factor::Matrix));
            tensor(space, &factors)
        }
        GateInstruction::PostSelectUp => Err(Error::NoMatrix("PostSelectUp")),
    }
}

/// Dense product of one Trotter step (first instruction applied first).
pub fn step_matrix(program: &GateProgram) -> Result<Operator> {
    let space = program.space();
    let mut acc = CMatrix::identity(space.dim(), space.dim());
    for inst in program.step() {
        acc = gate_matrix(inst, space)?.into_matrix() * acc;
    }
    Operator::new(space, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{max_abs, momentum_op, StateVector};

    #[test]
    fn trivial_gates() {
        let space = ModeSpace::hybrid(4, 1).unwrap();
        let rz = gate_matrix(&GateInstruction::RotationZ { angle: 0.0 }, space).unwrap();
        assert!(max_abs(&(rz.matrix() - CMatrix::identity(8, 8))) == 0.0);
        let h = gate_matrix(&GateInstruction::HadamardYZ, space).unwrap();
        let hh = h.compose(&h).unwrap();
        assert!(max_abs(&(hh.matrix() - CMatrix::identity(8, 8))) < 1e-12);
        assert!(matches!(
            gate_matrix(&GateInstruction::PostSelectUp, space),
            Err(Error::NoMatrix(_))
        ));
    }

    #[test]
    fn displacement_on_sigma_x_eigenstate_kicks_momentum() {
        let d = 40;
        let space = ModeSpace::hybrid(d, 1).unwrap();
        let kappa = 0.5;
        let cd = gate_matrix(
            &GateInstruction::ConditionalDisplacement { kappa: vec![kappa], angles: vec![0.0] },
            space,
        )
        .unwrap();
        let mut amps = nalgebra::DVector::zeros(2 * d);
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[d] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let plus = StateVector::new(space, amps).unwrap();
        let out = cd.apply(&plus).unwrap();
        let p = momentum_op(space, 0).unwrap();
        assert!((out.expectation(&p).unwrap() - kappa).abs() < 1e-10);
        // stays a product with |+>: both qubit halves equal
        let up = out.qubit_component(crate::hilbert::Qubit::Up).unwrap();
        let down = out.qubit_component(crate::hilbert::Qubit::Down).unwrap();
        assert!((up.amplitudes() - down.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn dimension_checked() {
        let space = ModeSpace::hybrid(3, 2).unwrap();
        let bad = GateInstruction::ConditionalDisplacement { kappa: vec![1.0], angles: vec![0.0] };
        assert!(gate_matrix(&bad, space).is_err());
    }
}
