use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::ModeSpace;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Tolerance below which a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub type CMatrix = DMatrix<Complex64>;

/// Dense operator on a [`ModeSpace`].
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: CMatrix,
    space: ModeSpace,
    hermitian: bool,
}

/// Largest entry of `|M - M^dag|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl Operator {
    pub fn new(space: ModeSpace, matrix: CMatrix) -> Result<Self> {
        check_square(&matrix, space.dim())?;
        Ok(Self {
            matrix,
            space,
            hermitian: false,
        })
    }

    /// Wraps `matrix` and marks it Hermitian after checking it is.
    pub fn hermitian(space: ModeSpace, matrix: CMatrix) -> Result<Self> {
        check_square(&matrix, space.dim())?;
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self {
            matrix,
            space,
            hermitian: true,
        })
    }

    pub fn identity(space: ModeSpace) -> Self {
        Self {
            matrix: CMatrix::identity(space.dim(), space.dim()),
            space,
            hermitian: true,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            ..self.clone()
        }
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        self.same_space(rhs)?;
        Operator::new(self.space, &self.matrix * &rhs.matrix)
    }

    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.same_space(rhs)?;
        Operator::new(
            self.space,
            &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix,
        )
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: state.space().dim(),
            });
        }
        Ok(StateVector::unnormalized(
            self.space,
            &self.matrix * state.amplitudes(),
        ))
    }

    /// Largest `|entry|` of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Operator) -> Result<f64> {
        self.same_space(rhs)?;
        Ok(max_abs(&(&self.matrix - &rhs.matrix)))
    }

    fn same_space(&self, rhs: &Operator) -> Result<()> {
        if self.space == rhs.space {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: rhs.space.dim(),
            })
        }
    }
}

pub(crate) fn check_square(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Spectral (largest singular value) norm.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

/// One factor of a Kronecker product in [`tensor`].
#[derive(Clone, Copy, Debug)]
pub enum Factor<'a> {
    Matrix(&'a CMatrix),
    Identity(usize),
}

impl Factor<'_> {
    fn dim(&self) -> usize {
        match self {
            Factor::Matrix(m) => m.nrows(),
            Factor::Identity(d) => *d,
        }
    }
}

/// Kronecker product of `factors` in the given order (qubit first, then
/// modes ascending), checked against `space`.
pub fn tensor(space: ModeSpace, factors: &[Factor<'_>]) -> Result<Operator> {
    let total: usize = factors.iter().map(Factor::dim).product();
    if total != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: total,
        });
    }
    for f in factors {
        if let Factor::Matrix(m) = f {
            check_square(m, m.nrows())?;
        }
    }
    let mut acc = CMatrix::identity(1, 1);
    let mut pending_identity = 1usize;
    for f in factors {
        match f {
            Factor::Identity(d) => pending_identity *= d,
            Factor::Matrix(m) => {
                if pending_identity > 1 {
                    acc = acc.kronecker(&CMatrix::identity(pending_identity, pending_identity));
                    pending_identity = 1;
                }
                acc = acc.kronecker(*m);
            }
        }
    }
    if pending_identity > 1 {
        acc = acc.kronecker(&CMatrix::identity(pending_identity, pending_identity));
    }
    Operator::new(space, acc)
}

/// Lifts a single-mode `d x d` matrix onto `mode` of `space`.
pub fn embed_mode(space: ModeSpace, mode: usize, single: &CMatrix) -> Result<Operator> {
    space.check_mode(mode)?;
    check_square(single, space.truncation_dim())?;
    let d = space.truncation_dim();
    let mut factors = Vec::with_capacity(space.num_modes() + 1);
    if space.qubit_present() {
        factors.push(Factor::Identity(2));
    }
    for n in 0..space.num_modes() {
        factors.push(if n == mode {
            Factor::Matrix(single)
        } else {
            Factor::Identity(d)
        });
    }
    tensor(space, &factors)
}

/// Lifts a `2 x 2` qubit matrix onto `space` (identity on the modes).
pub fn embed_qubit(space: ModeSpace, single: &CMatrix) -> Result<Operator> {
    if !space.qubit_present() {
        return Err(Error::InvalidParameter(
            "qubit operator on a space without a qubit".into(),
        ));
    }
    check_square(single, 2)?;
    tensor(
        space,
        &[Factor::Matrix(single), Factor::Identity(space.oscillator_dim())],
    )
}

/// Eigendecomposition `H = V diag(λ) V^dag` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Self {
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = CMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    /// `V diag(f(λ)) V^dag`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (c, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(c).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn exp(&self, scale: Complex64) -> CMatrix {
        self.map(|lambda| (scale * lambda).exp())
    }
}

/// `exp(scale · H)` for Hermitian `H`, via eigendecomposition.
pub fn hermitian_expm(h: &Operator, scale: Complex64) -> Result<Operator> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(hermiticity_defect(h.matrix())));
    }
    if !scale.re.is_finite() || !scale.im.is_finite() {
        return Err(Error::NonFinite(format!("expm scale {scale}")));
    }
    let eig = HermitianEigen::new(h.matrix());
    let matrix = eig.exp(scale);
    let hermitian = scale.im == 0.0;
    Ok(Operator {
        matrix,
        space: h.space(),
        hermitian,
    })
}

/// `max |U^dag U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}
