use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use super::space::ModeSpace;
use crate::error::{Error, Result};

/// Norm tolerance for states that claim to be normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Default number of Fock levels below the truncation edge that must stay empty.
pub const DEFAULT_LEAKAGE_BUFFER: usize = 8;

pub type CVector = DVector<Complex64>;

/// Computational qubit states; `Up` is the `+1` eigenstate of `σ_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Qubit {
    Up,
    Down,
}

impl Qubit {
    fn offset(self, space: &ModeSpace) -> usize {
        match self {
            Qubit::Up => 0,
            Qubit::Down => space.oscillator_dim(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: CVector,
    space: ModeSpace,
    normalized: bool,
    truncation_loss: f64,
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(space: ModeSpace, amplitudes: CVector) -> Result<Self> {
        check_len(&space, &amplitudes)?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(Self {
            amplitudes,
            space,
            normalized: true,
            truncation_loss: 0.0,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalize(space: ModeSpace, amplitudes: CVector) -> Result<Self> {
        check_len(&space, &amplitudes)?;
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize a state of norm {norm}"
            )));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            space,
            normalized: true,
            truncation_loss: 0.0,
        })
    }

    /// Intermediate vector (e.g. after a projection) with no norm guarantee.
    pub fn unnormalized(space: ModeSpace, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        Self {
            amplitudes,
            space,
            normalized: false,
            truncation_loss: 0.0,
        }
    }

    pub fn basis(space: ModeSpace, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: index + 1,
            });
        }
        let mut v = CVector::zeros(space.dim());
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(space, v)
    }

    /// Fock state `|qubit, n_1, …, n_N>`. `qubit` must be given iff the space has one.
    pub fn fock(space: ModeSpace, occupation: &[usize], qubit: Option<Qubit>) -> Result<Self> {
        let osc = space.occupation_index(occupation)?;
        let offset = match (space.qubit_present(), qubit) {
            (true, Some(q)) => q.offset(&space),
            (false, None) => 0,
            _ => {
                return Err(Error::InvalidParameter(
                    "qubit state must be given exactly when the space has a qubit".into(),
                ))
            }
        };
        Self::basis(space, offset + osc)
    }

    /// Tensor product `|qubit> ⊗ |ψ_1> ⊗ … ⊗ |ψ_N>` of single-mode vectors.
    pub fn product(space: ModeSpace, qubit: Option<Qubit>, modes: &[CVector]) -> Result<Self> {
        if modes.len() != space.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: space.num_modes(),
                actual: modes.len(),
            });
        }
        let d = space.truncation_dim();
        let mut osc = CVector::from_element(1, Complex64::new(1.0, 0.0));
        for m in modes {
            if m.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: m.len(),
                });
            }
            osc = osc.kronecker(m);
        }
        let full = match (space.qubit_present(), qubit) {
            (false, None) => osc,
            (true, Some(q)) => {
                let mut v = CVector::zeros(space.dim());
                let off = q.offset(&space);
                v.rows_mut(off, osc.len()).copy_from(&osc);
                v
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "qubit state must be given exactly when the space has a qubit".into(),
                ))
            }
        };
        Self::normalize(space, full)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `1 - (norm before renormalization)^2` for states cut from an infinite expansion.
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn with_truncation_loss(mut self, loss: f64) -> Self {
        self.truncation_loss = loss;
        self
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        same_space(self, other)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `<ψ|O|ψ> / <ψ|ψ>`, real part.
    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        let applied = op.apply(self)?;
        Ok(self.amplitudes.dotc(applied.amplitudes()).re / self.amplitudes.norm_squared())
    }

    /// `(<q| ⊗ I) |ψ>` as an oscillator-only, unnormalized vector.
    pub fn qubit_component(&self, qubit: Qubit) -> Result<StateVector> {
        if !self.space.qubit_present() {
            return Err(Error::InvalidParameter("state has no qubit".into()));
        }
        let n = self.space.oscillator_dim();
        let off = qubit.offset(&self.space);
        Ok(StateVector::unnormalized(
            self.space.without_qubit(),
            self.amplitudes.rows(off, n).into_owned(),
        ))
    }

    /// `|q> ⊗ |ψ>` for an oscillator-only state.
    pub fn attach_qubit(&self, qubit: Qubit) -> Result<StateVector> {
        if self.space.qubit_present() {
            return Err(Error::InvalidParameter("state already has a qubit".into()));
        }
        let space = self.space.with_qubit();
        let mut v = CVector::zeros(space.dim());
        v.rows_mut(qubit.offset(&space), self.amplitudes.len())
            .copy_from(&self.amplitudes);
        Ok(StateVector {
            amplitudes: v,
            space,
            normalized: self.normalized,
            truncation_loss: self.truncation_loss,
        })
    }

    /// Population on basis states with any mode at or above level `truncation_dim - buffer`.
    pub fn leakage(&self, buffer: usize) -> f64 {
        let d = self.space.truncation_dim();
        let edge = d.saturating_sub(buffer);
        let osc_dim = self.space.oscillator_dim();
        let mut total = 0.0;
        let mut norm = 0.0;
        for (idx, z) in self.amplitudes.iter().enumerate() {
            let p = z.norm_sqr();
            norm += p;
            if p == 0.0 {
                continue;
            }
            let mut rest = idx % osc_dim;
            let mut high = false;
            for _ in 0..self.space.num_modes() {
                if rest % d >= edge {
                    high = true;
                    break;
                }
                rest /= d;
            }
            if high {
                total += p;
            }
        }
        if norm > 0.0 {
            total / norm
        } else {
            0.0
        }
    }
}

fn check_len(space: &ModeSpace, v: &CVector) -> Result<()> {
    if v.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: v.len(),
        });
    }
    Ok(())
}

fn same_space(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.space == b.space {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a.space.dim(),
            actual: b.space.dim(),
        })
    }
}

/// Squared overlap `|<a|b>|^2`, divided by the norms so it stays in `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr();
    let norms = a.amplitudes.norm_squared() * b.amplitudes.norm_squared();
    if norms == 0.0 {
        return Err(Error::InvalidParameter("fidelity of a zero vector".into()));
    }
    Ok((overlap / norms).clamp(0.0, 1.0))
}

/// Truncated coherent-state amplitudes `e^{-|α|²/2} α^n / sqrt(n!)`, renormalized.
///
/// Returns the vector and the discarded weight `1 - norm²` before renormalization.
pub fn single_mode_coherent(dim: usize, alpha: Complex64) -> Result<(CVector, f64)> {
    let norm_sq = alpha.norm_sqr();
    let limit = dim as f64 / 4.0;
    if !norm_sq.is_finite() {
        return Err(Error::NonFinite(format!("coherent amplitude {alpha}")));
    }
    if norm_sq > limit {
        return Err(Error::AlphaTooLarge { norm_sq, limit });
    }
    let mut v = CVector::zeros(dim);
    let mut amp = Complex64::new((-norm_sq / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        v[n] = amp;
    }
    let kept = v.norm_squared();
    let loss = (1.0 - kept).max(0.0);
    Ok((v.unscale(kept.sqrt()), loss))
}

/// Coherent state `|α>` on `mode`, vacuum on the other modes and `|↑>` on the qubit if present.
pub fn coherent_state(space: ModeSpace, mode: usize, alpha: Complex64) -> Result<StateVector> {
    space.check_mode(mode)?;
    let d = space.truncation_dim();
    let (coh, loss) = single_mode_coherent(d, alpha)?;
    let modes: Vec<CVector> = (0..space.num_modes())
        .map(|n| {
            if n == mode {
                coh.clone()
            } else {
                let mut vac = CVector::zeros(d);
                vac[0] = Complex64::new(1.0, 0.0);
                vac
            }
        })
        .collect();
    let qubit = space.qubit_present().then_some(Qubit::Up);
    Ok(StateVector::product(space, qubit, &modes)?.with_truncation_loss(loss))
}

/// Population `|<n_1..n_N|ψ>|²`.
///
/// With a qubit present, `Some(q)` projects onto `|q>`; `None` traces the qubit out.
pub fn fock_population(
    state: &StateVector,
    occupation: &[usize],
    qubit: Option<Qubit>,
) -> Result<f64> {
    let space = state.space();
    let osc = space.occupation_index(occupation)?;
    let amps = state.amplitudes();
    let norm = amps.norm_squared();
    let raw = if !space.qubit_present() {
        amps[osc].norm_sqr()
    } else {
        match qubit {
            Some(q) => amps[q.offset(&space) + osc].norm_sqr(),
            None => amps[osc].norm_sqr() + amps[space.oscillator_dim() + osc].norm_sqr(),
        }
    };
    Ok(raw / norm)
}
