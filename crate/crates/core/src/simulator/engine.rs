//! Factored form of one Trotter step.
//!
//! Consecutive qubit rotations and conditional displacements that share the
//! same quadrature angles act, in the joint eigenbasis of those quadratures,
//! as one 2x2 qubit matrix per grid point. A step therefore reduces to a few
//! segments: diagonal free-evolution phases in the Fock basis, and blocks on a
//! quadrature grid bracketed by per-mode basis changes.

use num_complex::Complex64;

use super::gates::{
    block_mul, displacement_block, free_phases, hadamard_block, rotation_block, Block,
    IDENTITY_BLOCK,
};
use crate::compiler::GateInstruction;
use crate::error::{Error, Result};
use crate::hilbert::{apply_mode_matrix, linear_form_on_grid, CMatrix, ModeSpace, QuadratureBasis};

#[derive(Clone, Debug)]
struct GridBasis {
    /// Per-mode eigenvector matrices `S_n` and their adjoints.
    vectors: Vec<CMatrix>,
    adjoints: Vec<CMatrix>,
    bases: Vec<QuadratureBasis>,
}

#[derive(Clone, Debug)]
enum Segment {
    /// Phases on the oscillator index, same for both qubit halves.
    Diagonal(Vec<Complex64>),
    /// One qubit matrix for every oscillator basis state.
    Qubit(Block),
    /// Qubit matrices per grid point of basis `basis`.
    Grid { basis: usize, blocks: Vec<Block> },
}

/// Precomputed step operator for repeated application.
#[derive(Clone, Debug)]
pub struct CompiledStep {
    space: ModeSpace,
    grids: Vec<GridBasis>,
    grid_angles: Vec<Vec<f64>>,
    segments: Vec<Segment>,
}

enum Pending {
    None,
    Qubit(Block),
    Grid(usize, Vec<Block>),
}

impl CompiledStep {
    /// Builds the factored operator for `instructions` applied in order.
    ///
    /// Qubit gates need a qubit in `space`; oscillator-only spaces accept only
    /// free evolutions. `PostSelectUp` is rejected.
    pub fn new(space: ModeSpace, instructions: &[GateInstruction]) -> Result<Self> {
        let mut step = Self {
            space,
            grids: Vec::new(),
            grid_angles: Vec::new(),
            segments: Vec::new(),
        };
        let mut pending = Pending::None;
        for inst in instructions {
            match inst {
                GateInstruction::RotationZ { .. } | GateInstruction::HadamardYZ => {
                    step.require_qubit()?;
                    let b = match inst {
                        GateInstruction::RotationZ { angle } => rotation_block(*angle),
                        _ => hadamard_block(),
                    };
                    pending = match pending {
                        Pending::None => Pending::Qubit(b),
                        Pending::Qubit(acc) => Pending::Qubit(block_mul(&b, &acc)),
                        Pending::Grid(g, mut blocks) => {
                            for x in blocks.iter_mut() {
                                *x = block_mul(&b, x);
                            }
                            Pending::Grid(g, blocks)
                        }
                    };
                }
                GateInstruction::ConditionalDisplacement { kappa, angles } => {
                    step.require_qubit()?;
                    step.check_len(kappa.len())?;
                    step.check_len(angles.len())?;
                    let g = step.grid_for(angles);
                    let mut current = match pending {
                        Pending::Grid(pg, blocks) if pg == g => blocks,
                        other => {
                            let start = match other {
                                Pending::Qubit(b) => b,
                                Pending::Grid(pg, blocks) => {
                                    step.segments.push(Segment::Grid { basis: pg, blocks });
                                    IDENTITY_BLOCK
                                }
                                Pending::None => IDENTITY_BLOCK,
                            };
                            vec![start; space.oscillator_dim()]
                        }
                    };
                    let y = linear_form_on_grid(&step.grids[g].bases, kappa);
                    for (x, &yv) in current.iter_mut().zip(&y) {
                        *x = block_mul(&displacement_block(yv), x);
                    }
                    pending = Pending::Grid(g, current);
                }
                GateInstruction::FreeEvolution {
                    duration,
                    frequencies,
                } => {
                    step.check_len(frequencies.len())?;
                    step.flush(std::mem::replace(&mut pending, Pending::None));
                    let phases = step.free_diagonal(*duration, frequencies);
                    match step.segments.last_mut() {
                        Some(Segment::Diagonal(prev)) => {
                            for (p, q) in prev.iter_mut().zip(&phases) {
                                *p *= q;
                            }
                        }
                        _ => step.segments.push(Segment::Diagonal(phases)),
                    }
                }
                GateInstruction::PostSelectUp => return Err(Error::NoMatrix("PostSelectUp")),
            }
        }
        step.flush(pending);
        Ok(step)
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    fn require_qubit(&self) -> Result<()> {
        if self.space.qubit_present() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("qubit gate on a space without a qubit".into()))
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.space.num_modes() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.space.num_modes(),
                actual: len,
            })
        }
    }

    fn flush(&mut self, pending: Pending) {
        match pending {
            Pending::None => {}
            Pending::Qubit(b) => self.segments.push(Segment::Qubit(b)),
            Pending::Grid(g, blocks) => self.segments.push(Segment::Grid { basis: g, blocks }),
        }
    }

    fn grid_for(&mut self, angles: &[f64]) -> usize {
        if let Some(i) = self.grid_angles.iter().position(|a| a == angles) {
            return i;
        }
        let d = self.space.truncation_dim();
        let bases: Vec<QuadratureBasis> = angles.iter().map(|&t| QuadratureBasis::new(d, t)).collect();
        self.grids.push(GridBasis {
            vectors: bases.iter().map(|b| b.vectors.clone()).collect(),
            adjoints: bases.iter().map(|b| b.vectors.adjoint()).collect(),
            bases,
        });
        self.grid_angles.push(angles.to_vec());
        self.grids.len() - 1
    }

    /// Composite diagonal with the first mode most significant.
    fn free_diagonal(&self, duration: f64, frequencies: &[f64]) -> Vec<Complex64> {
        let d = self.space.truncation_dim();
        let mut diag = vec![Complex64::new(1.0, 0.0)];
        for &w in frequencies {
            let phases = free_phases(d, duration, w);
            diag = diag
                .iter()
                .flat_map(|a| phases.iter().map(move |p| a * p))
                .collect();
        }
        diag
    }

    /// `psi <- step · psi` in place.
    pub fn apply(&self, psi: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let osc = self.space.oscillator_dim();
        for seg in &self.segments {
            match seg {
                Segment::Diagonal(phases) => {
                    for half in psi.chunks_mut(osc) {
                        for (z, p) in half.iter_mut().zip(phases) {
                            *z *= p;
                        }
                    }
                }
                Segment::Qubit(b) => {
                    let (up, down) = psi.split_at_mut(osc);
                    apply_blocks(up, down, std::iter::repeat(b));
                }
                Segment::Grid { basis, blocks } => {
                    let grid = &self.grids[*basis];
                    for (n, s) in grid.adjoints.iter().enumerate() {
                        apply_mode_matrix(psi, &self.space, n, s, scratch);
                    }
                    let (up, down) = psi.split_at_mut(osc);
                    apply_blocks(up, down, blocks.iter());
                    for (n, s) in grid.vectors.iter().enumerate() {
                        apply_mode_matrix(psi, &self.space, n, s, scratch);
                    }
                }
            }
        }
    }

    /// Number of grid-basis round trips per application.
    pub fn grid_segments(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Grid { .. }))
            .count()
    }
}

fn apply_blocks<'a>(up: &mut [Complex64], down: &mut [Complex64], blocks: impl Iterator<Item = &'a Block>) {
    for ((u, v), b) in up.iter_mut().zip(down.iter_mut()).zip(blocks) {
        let (a, c) = (*u, *v);
        *u = b[0] * a + b[1] * c;
        *v = b[2] * a + b[3] * c;
    }
}
