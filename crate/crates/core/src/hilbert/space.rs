use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The truncated Hilbert space `qubit ⊗ mode_1 ⊗ … ⊗ mode_N`.
///
/// Basis vectors are ordered row-major with the qubit as the most significant
/// factor, followed by the modes in ascending order. Each mode keeps the
/// Fock levels `0..truncation_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeSpace {
    truncation_dim: usize,
    num_modes: usize,
    qubit_present: bool,
}

impl ModeSpace {
    pub fn new(truncation_dim: usize, num_modes: usize, qubit_present: bool) -> Result<Self> {
        if truncation_dim == 0 || num_modes == 0 {
            return Err(Error::InvalidParameter(format!(
                "truncation_dim ({truncation_dim}) and num_modes ({num_modes}) must be positive"
            )));
        }
        let space = Self {
            truncation_dim,
            num_modes,
            qubit_present,
        };
        truncation_dim
            .checked_pow(num_modes as u32)
            .and_then(|d| d.checked_mul(space.qubit_dim()))
            .ok_or_else(|| Error::InvalidParameter("space dimension overflows usize".into()))?;
        Ok(space)
    }

    /// Oscillator-only space.
    pub fn oscillators(truncation_dim: usize, num_modes: usize) -> Result<Self> {
        Self::new(truncation_dim, num_modes, false)
    }

    /// Space with one ancilla qubit in front of the modes.
    pub fn hybrid(truncation_dim: usize, num_modes: usize) -> Result<Self> {
        Self::new(truncation_dim, num_modes, true)
    }

    pub fn truncation_dim(&self) -> usize {
        self.truncation_dim
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn qubit_present(&self) -> bool {
        self.qubit_present
    }

    pub fn qubit_dim(&self) -> usize {
        if self.qubit_present {
            2
        } else {
            1
        }
    }

    /// Dimension of the oscillator factor, `truncation_dim^num_modes`.
    pub fn oscillator_dim(&self) -> usize {
        self.truncation_dim.pow(self.num_modes as u32)
    }

    pub fn dim(&self) -> usize {
        self.qubit_dim() * self.oscillator_dim()
    }

    pub fn without_qubit(&self) -> Self {
        Self {
            qubit_present: false,
            ..*self
        }
    }

    pub fn with_qubit(&self) -> Self {
        Self {
            qubit_present: true,
            ..*self
        }
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.num_modes {
            Ok(())
        } else {
            Err(Error::ModeIndex {
                index: mode,
                num_modes: self.num_modes,
            })
        }
    }

    /// Distance in the composite index between neighbouring Fock levels of `mode`.
    pub fn mode_stride(&self, mode: usize) -> usize {
        self.truncation_dim.pow((self.num_modes - 1 - mode) as u32)
    }

    /// Oscillator-factor index of a multi-mode occupation.
    pub fn occupation_index(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.num_modes
            || occupation.iter().any(|&n| n >= self.truncation_dim)
        {
            return Err(Error::Occupation(occupation.to_vec()));
        }
        Ok(occupation
            .iter()
            .fold(0, |acc, &n| acc * self.truncation_dim + n))
    }

    /// Inverse of [`ModeSpace::occupation_index`].
    pub fn occupation(&self, mut oscillator_index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.num_modes];
        for slot in occ.iter_mut().rev() {
            *slot = oscillator_index % self.truncation_dim;
            oscillator_index /= self.truncation_dim;
        }
        occ
    }
}

impl std::fmt::Display for ModeSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}^{}",
            if self.qubit_present { "2x" } else { "" },
            self.truncation_dim,
            self.num_modes
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let s = ModeSpace::hybrid(3, 2).unwrap();
        assert_eq!(s.dim(), 18);
        assert_eq!(s.oscillator_dim(), 9);
        assert_eq!(s.without_qubit().dim(), 9);
        assert_eq!(s.mode_stride(0), 3);
        assert_eq!(s.mode_stride(1), 1);
    }

    #[test]
    fn occupation_round_trip() {
        let s = ModeSpace::oscillators(5, 3).unwrap();
        for idx in 0..s.oscillator_dim() {
            assert_eq!(s.occupation_index(&s.occupation(idx)).unwrap(), idx);
        }
        assert!(s.occupation_index(&[5, 0, 0]).is_err());
        assert!(s.occupation_index(&[0, 0]).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(ModeSpace::new(0, 1, false).is_err());
        assert!(ModeSpace::new(4, 0, true).is_err());
        assert!(ModeSpace::new(1 << 20, 8, true).is_err());
    }
}
