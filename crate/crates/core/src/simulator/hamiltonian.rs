use std::fmt::Write as _;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fourier::{PotentialForm, PotentialSpec};
use crate::hilbert::{
    single_mode_number_generator, single_mode_quadrature, tensor, CMatrix, Factor, ModeSpace,
    Operator, QuadratureBasis,
};
use crate::text::fmt_f64;

/// Sample count per axis used to fingerprint callable potentials.
const DIGEST_SAMPLES: usize = 17;

/// `H = Σ_n ω_n/2 (X_n² + P_n²) + V(Q)`.
///
/// `absorbed_x2[n]` records how much `X_n²` was moved out of the physical
/// potential into the harmonic part: the physical potential is
/// `V + Σ_n absorbed_x2[n] X_n²`, and it is informational only. The matrix
/// built here is always `H_0 + V`.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    frequencies: Vec<f64>,
    potential: PotentialSpec,
    absorbed_x2: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(frequencies: Vec<f64>, potential: PotentialSpec) -> Result<Self> {
        if frequencies.len() != potential.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: potential.num_modes(),
                actual: frequencies.len(),
            });
        }
        if frequencies.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("mode frequency".into()));
        }
        let absorbed_x2 = vec![0.0; frequencies.len()];
        Ok(Self {
            frequencies,
            potential,
            absorbed_x2,
        })
    }

    pub fn with_absorbed_x2(mut self, absorbed: Vec<f64>) -> Result<Self> {
        if absorbed.len() != self.frequencies.len() {
            return Err(Error::DimensionMismatch {
                expected: self.frequencies.len(),
                actual: absorbed.len(),
            });
        }
        self.absorbed_x2 = absorbed;
        Ok(self)
    }

    pub fn num_modes(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn absorbed_x2(&self) -> &[f64] {
        &self.absorbed_x2
    }

    /// SHA-256 of a canonical text form. Callable potentials are fingerprinted
    /// by their values on a fixed grid.
    pub fn digest(&self) -> String {
        let mut text = String::new();
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ");
        let p = &self.potential;
        writeln!(text, "frequencies {}", join(&self.frequencies)).unwrap();
        writeln!(text, "absorbed_x2 {}", join(&self.absorbed_x2)).unwrap();
        writeln!(text, "angles {}", join(p.angles())).unwrap();
        writeln!(text, "domain {}", join(p.domain_lengths())).unwrap();
        match p.form() {
            PotentialForm::Polynomial(terms) => {
                for t in terms {
                    let e: Vec<String> = t.exponents.iter().map(|x| x.to_string()).collect();
                    writeln!(text, "mono {} {}", fmt_f64(t.coefficient), e.join(" ")).unwrap();
                }
            }
            PotentialForm::Callable(f) => {
                let n = p.num_modes();
                let mut point = vec![0.0; n];
                for flat in 0..DIGEST_SAMPLES.pow(n as u32) {
                    let mut rest = flat;
                    for axis in (0..n).rev() {
                        let j = rest % DIGEST_SAMPLES;
                        rest /= DIGEST_SAMPLES;
                        let l = p.domain_lengths()[axis];
                        point[axis] = -l / 2.0 + l * j as f64 / (DIGEST_SAMPLES - 1) as f64;
                    }
                    writeln!(text, "sample {}", fmt_f64(f(&point))).unwrap();
                }
            }
        }
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn check_space(&self, space: &ModeSpace) -> Result<ModeSpace> {
        if space.num_modes() != self.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.num_modes(),
                actual: space.num_modes(),
            });
        }
        Ok(space.without_qubit())
    }

    /// `Σ_n ω_n/2 (X_n² + P_n²)` from the truncated quadratures.
    pub fn quadratic_matrix(&self, space: &ModeSpace) -> Result<CMatrix> {
        let osc = self.check_space(space)?;
        let d = osc.truncation_dim();
        let number = single_mode_number_generator(d);
        let mut h = CMatrix::zeros(osc.dim(), osc.dim());
        for (n, &w) in self.frequencies.iter().enumerate() {
            let scaled = &number * Complex64::new(w / 2.0, 0.0);
            let factors: Vec<Factor> = (0..osc.num_modes())
                .map(|m| if m == n { Factor::Matrix(&scaled) } else { Factor::Identity(d) })
                .collect();
            h += tensor(osc, &factors)?.into_matrix();
        }
        Ok(h)
    }

    /// `V(Q)` as a matrix: operator polynomial for monomials, eigen-grid for callables.
    pub fn potential_matrix(&self, space: &ModeSpace) -> Result<CMatrix> {
        let osc = self.check_space(space)?;
        let d = osc.truncation_dim();
        let angles = self.potential.angles();
        match self.potential.form() {
            PotentialForm::Polynomial(terms) => {
                let quads: Vec<CMatrix> = angles.iter().map(|&t| single_mode_quadrature(d, t)).collect();
                let mut v = CMatrix::zeros(osc.dim(), osc.dim());
                for t in terms {
                    if t.coefficient == 0.0 {
                        continue;
                    }
                    let powers: Vec<CMatrix> = t
                        .exponents
                        .iter()
                        .zip(&quads)
                        .map(|(&p, q)| matrix_power(q, p))
                        .collect();
                    let factors: Vec<Factor> = powers.iter().map(Factor::Matrix).collect();
                    v += tensor(osc, &factors)?.into_matrix() * Complex64::new(t.coefficient, 0.0);
                }
                Ok(v)
            }
            PotentialForm::Callable(f) => {
                let bases: Vec<QuadratureBasis> =
                    angles.iter().map(|&t| QuadratureBasis::new(d, t)).collect();
                let factors: Vec<Factor> = bases.iter().map(|b| Factor::Matrix(&b.vectors)).collect();
                let s = tensor(osc, &factors)?.into_matrix();
                let values = grid_values(&bases, |q| f(q))?;
                let mut scaled = s.clone();
                for (c, v) in values.iter().enumerate() {
                    for z in scaled.column_mut(c).iter_mut() {
                        *z *= *v;
                    }
                }
                let m = scaled * s.adjoint();
                Ok((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
            }
        }
    }

    /// Full Hermitian `H_0 + V` on the oscillator part of `space`.
    pub fn matrix(&self, space: &ModeSpace) -> Result<Operator> {
        let osc = self.check_space(space)?;
        let h = self.quadratic_matrix(&osc)? + self.potential_matrix(&osc)?;
        Operator::hermitian(osc, h)
    }
}

/// `f` on the joint quadrature grid, composite order.
pub(crate) fn grid_values(bases: &[QuadratureBasis], f: impl Fn(&[f64]) -> f64) -> Result<Vec<f64>> {
    let d = bases.first().map(|b| b.points.len()).unwrap_or(1);
    let n = bases.len();
    let total = d.pow(n as u32);
    let mut point = vec![0.0; n];
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        for axis in (0..n).rev() {
            point[axis] = bases[axis].points[rest % d];
            rest /= d;
        }
        let v = f(&point);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("potential at {point:?}")));
        }
        out.push(v);
    }
    Ok(out)
}

fn matrix_power(m: &CMatrix, p: u32) -> CMatrix {
    let mut out = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..p {
        out = &out * m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Monomial;
    use crate::hilbert::{max_abs, momentum_op, position_op};

    #[test]
    fn matrix_matches_term_by_term_build() {
        let space = ModeSpace::oscillators(6, 2).unwrap();
        let v = PotentialSpec::polynomial(
            vec![Monomial::new(0.3, vec![1, 2]), Monomial::new(-0.1, vec![4, 0])],
            vec![6.0, 6.0],
        )
        .unwrap();
        let h = HamiltonianSpec::new(vec![1.0, 0.5], v).unwrap();
        let got = h.matrix(&space).unwrap();

        let x = |n| position_op(space, n).unwrap().into_matrix();
        let p = |n| momentum_op(space, n).unwrap().into_matrix();
        let half = |w: f64| Complex64::new(w / 2.0, 0.0);
        // X² + P² from full products differs from the generator only at the top level.
        let mut expect = (x(0) * x(0) + p(0) * p(0)) * half(1.0) + (x(1) * x(1) + p(1) * p(1)) * half(0.5);
        let x0 = x(0);
        let x1 = x(1);
        expect += &x0 * &x1 * &x1 * Complex64::new(0.3, 0.0);
        expect += &x0 * &x0 * &x0 * &x0 * Complex64::new(-0.1, 0.0);
        let diff = got.matrix() - expect;
        // compare away from the truncation edge of each mode
        let mut worst: f64 = 0.0;
        for r in 0..space.dim() {
            for c in 0..space.dim() {
                let (a, b) = (space.occupation(r), space.occupation(c));
                if a.iter().chain(&b).all(|&k| k < 5) {
                    worst = worst.max(diff[(r, c)].norm());
                }
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn callable_route_matches_polynomial() {
        let space = ModeSpace::oscillators(10, 1).unwrap();
        let poly = PotentialSpec::polynomial(vec![Monomial::new(0.2, vec![3])], vec![5.0]).unwrap();
        let call = PotentialSpec::callable(|q| 0.2 * q[0].powi(3), vec![5.0]).unwrap();
        let a = HamiltonianSpec::new(vec![1.0], poly).unwrap().potential_matrix(&space).unwrap();
        let b = HamiltonianSpec::new(vec![1.0], call).unwrap().potential_matrix(&space).unwrap();
        assert!(max_abs(&(a - b)) < 1e-10);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let v = || PotentialSpec::polynomial(vec![Monomial::new(1.0, vec![4])], vec![2.0]).unwrap();
        let a = HamiltonianSpec::new(vec![1.0], v()).unwrap();
        let b = HamiltonianSpec::new(vec![1.0], v()).unwrap();
        let c = HamiltonianSpec::new(vec![1.1], v()).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        let f = HamiltonianSpec::new(vec![1.0], PotentialSpec::callable(|q| q[0], vec![2.0]).unwrap()).unwrap();
        assert_eq!(f.digest().len(), 64);
    }

    #[test]
    fn frequency_count_checked() {
        assert!(HamiltonianSpec::new(vec![1.0, 2.0], PotentialSpec::zero(vec![1.0]).unwrap()).is_err());
    }
}
