use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `coefficient · Π_n q_n^{exponents[n]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coefficient: f64, exponents: Vec<u32>) -> Self {
        Self {
            coefficient,
            exponents,
        }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(point)
            .fold(self.coefficient, |acc, (&p, &q)| acc * q.powi(p as i32))
    }
}

pub type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum PotentialForm {
    Polynomial(Vec<Monomial>),
    Callable(PotentialFn),
}

impl fmt::Debug for PotentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialForm::Polynomial(terms) => f.debug_tuple("Polynomial").field(terms).finish(),
            PotentialForm::Callable(_) => f.write_str("Callable(..)"),
        }
    }
}

/// A real potential `V(Q_1^{θ_1}, …, Q_N^{θ_N})` with the box it is expanded on.
#[derive(Clone, Debug)]
pub struct PotentialSpec {
    num_modes: usize,
    angles: Vec<f64>,
    form: PotentialForm,
    domain_lengths: Vec<f64>,
}

impl PotentialSpec {
    /// Polynomial potential in the position quadratures.
    pub fn polynomial(terms: Vec<Monomial>, domain_lengths: Vec<f64>) -> Result<Self> {
        let num_modes = domain_lengths.len();
        for t in &terms {
            if !t.coefficient.is_finite() {
                return Err(Error::NonFinite(format!("monomial coefficient {}", t.coefficient)));
            }
            if t.exponents.len() != num_modes {
                return Err(Error::DimensionMismatch {
                    expected: num_modes,
                    actual: t.exponents.len(),
                });
            }
        }
        Self::build(num_modes, PotentialForm::Polynomial(terms), domain_lengths)
    }

    pub fn callable(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        domain_lengths: Vec<f64>,
    ) -> Result<Self> {
        Self::build(domain_lengths.len(), PotentialForm::Callable(Arc::new(f)), domain_lengths)
    }

    /// The identically zero potential on `num_modes` modes.
    pub fn zero(domain_lengths: Vec<f64>) -> Result<Self> {
        Self::polynomial(Vec::new(), domain_lengths)
    }

    fn build(num_modes: usize, form: PotentialForm, domain_lengths: Vec<f64>) -> Result<Self> {
        if num_modes == 0 {
            return Err(Error::InvalidParameter("potential needs at least one mode".into()));
        }
        if let Some(bad) = domain_lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "domain lengths must be positive and finite, got {bad}"
            )));
        }
        Ok(Self {
            num_modes,
            angles: vec![0.0; num_modes],
            form,
            domain_lengths,
        })
    }

    /// Expands in `Q_n^{θ_n}` instead of the positions.
    pub fn with_angles(mut self, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != self.num_modes {
            return Err(Error::DimensionMismatch {
                expected: self.num_modes,
                actual: angles.len(),
            });
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("quadrature angle".into()));
        }
        self.angles = angles;
        Ok(self)
    }

    pub fn with_domain_lengths(self, domain_lengths: Vec<f64>) -> Result<Self> {
        if domain_lengths.len() != self.num_modes {
            return Err(Error::DimensionMismatch {
                expected: self.num_modes,
                actual: domain_lengths.len(),
            });
        }
        let angles = self.angles;
        Self::build(self.num_modes, self.form, domain_lengths)?.with_angles(angles)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn domain_lengths(&self) -> &[f64] {
        &self.domain_lengths
    }

    pub fn form(&self) -> &PotentialForm {
        &self.form
    }

    pub fn monomials(&self) -> Option<&[Monomial]> {
        match &self.form {
            PotentialForm::Polynomial(t) => Some(t),
            PotentialForm::Callable(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.form, PotentialForm::Polynomial(t) if t.iter().all(|m| m.coefficient == 0.0))
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        match &self.form {
            PotentialForm::Polynomial(terms) => terms.iter().map(|t| t.evaluate(point)).sum(),
            PotentialForm::Callable(f) => f(point),
        }
    }
}

/// Box length that holds `|mean| + 4 σ` on both sides of the origin.
pub fn default_domain_length(mean: f64, sigma: f64) -> f64 {
    2.0 * (mean.abs() + 4.0 * sigma)
}
