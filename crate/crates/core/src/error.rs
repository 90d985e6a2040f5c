use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {index} out of range for {num_modes} mode(s)")]
    ModeIndex { index: usize, num_modes: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not Hermitian (max |M - M^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("coherent amplitude |alpha|^2 = {norm_sq} exceeds truncation_dim / 4 = {limit}")]
    AlphaTooLarge { norm_sq: f64, limit: f64 },

    #[error("occupation {0:?} outside the truncated Fock space")]
    Occupation(Vec<usize>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("potential is not a polynomial")]
    NotPolynomial,

    #[error("instruction has no matrix representation: {0}")]
    NoMatrix(&'static str),

    #[error("postselection success probability {probability:e} below floor {floor:e}")]
    PostselectionFailed { probability: f64, floor: f64 },

    #[error("untrusted result: leakage {leakage:e} above threshold {threshold:e}")]
    Leakage { leakage: f64, threshold: f64 },

    #[error("reconstruction error {error:e} exceeds bound {bound:e}; raise N_F or enlarge the domain lengths")]
    Reconstruction { error: f64, bound: f64 },

    #[error("IR parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors that stem from numerical trust checks rather than bad input.
    pub fn is_numerical_trust(&self) -> bool {
        matches!(
            self,
            Error::PostselectionFailed { .. } | Error::Leakage { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
