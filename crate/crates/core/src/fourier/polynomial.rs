use std::f64::consts::PI;

use num_complex::Complex64;

use super::potential::PotentialSpec;
use super::series::{CoefficientGrid, FourierSeries, DEFAULT_PRUNE_THRESHOLD};
use crate::error::{Error, Result};

/// Exact series of a polynomial potential, term by term and axis by axis.
pub fn coefficients_polynomial(spec: &PotentialSpec, max_order: usize) -> Result<FourierSeries> {
    let grid = polynomial_grid(spec, max_order)?;
    Ok(FourierSeries::from_grid(&grid, spec, DEFAULT_PRUNE_THRESHOLD))
}

pub fn polynomial_grid(spec: &PotentialSpec, max_order: usize) -> Result<CoefficientGrid> {
    let monomials = spec.monomials().ok_or(Error::NotPolynomial)?;
    let n = spec.num_modes();
    let side = 2 * max_order + 1;
    let mut data = vec![Complex64::new(0.0, 0.0); side.pow(n as u32)];
    for mono in monomials {
        // tables[axis][m + N_F] = (1/L) ∫ x^p e^{-i m k x} dx
        let tables: Vec<Vec<Complex64>> = mono
            .exponents
            .iter()
            .zip(spec.domain_lengths())
            .map(|(&p, &l)| {
                (0..side)
                    .map(|mi| axis_coefficient(p, mi as i64 - max_order as i64, l))
                    .collect()
            })
            .collect();
        for (flat, slot) in data.iter_mut().enumerate() {
            let mut rest = flat;
            let mut c = Complex64::new(mono.coefficient, 0.0);
            for axis in (0..n).rev() {
                c *= tables[axis][rest % side];
                rest /= side;
            }
            *slot += c;
        }
    }
    Ok(CoefficientGrid::new(n, max_order, data))
}

/// `(1/L) ∫_{-L/2}^{L/2} x^p e^{-i m (2π/L) x} dx`.
fn axis_coefficient(p: u32, m: i64, l: f64) -> Complex64 {
    let h = l / 2.0;
    if m == 0 {
        let q = p as i32 + 1;
        return Complex64::new((h.powi(q) - (-h).powi(q)) / q as f64 / l, 0.0);
    }
    let (ic, is) = cos_sin_moments(p, m.unsigned_abs(), l);
    let is = if m < 0 { -is } else { is };
    Complex64::new(ic, -is) / l
}

/// `(∫ x^p cos(a x), ∫ x^p sin(a x))` over `[-L/2, L/2]` with `a = 2π m / L`, `m ≥ 1`.
///
/// Integration by parts; the boundary terms use `sin(πm) = 0` and `cos(πm) = (-1)^m` exactly.
fn cos_sin_moments(p: u32, m: u64, l: f64) -> (f64, f64) {
    let h = l / 2.0;
    let a = 2.0 * PI * m as f64 / l;
    let parity = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let (mut ic, mut is) = (0.0, 0.0);
    for q in 1..=p {
        let qf = q as f64;
        let boundary = h.powi(q as i32) - (-h).powi(q as i32);
        let next_c = -(qf / a) * is;
        let next_s = -parity / a * boundary + (qf / a) * ic;
        ic = next_c;
        is = next_s;
    }
    (ic, is)
}
