use log::warn;

use super::ir::{GateInstruction, GateProgram, ProgramMetadata, Splitting};
use super::qsp::{compile_trig_gate, TrigGateParams, TrigKind};
use crate::error::{Error, Result};
use crate::fourier::{coefficients, FourierSeries};
use crate::hilbert::ModeSpace;
use crate::simulator::HamiltonianSpec;

/// `|ϑ|` above which the small-angle expansion behind the trig gates is doubtful.
pub const THETA_WARN: f64 = 0.2;

/// What to do with trig gates whose `|ϑ|` exceeds [`ThetaGuard::max_theta`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaGuard {
    pub max_theta: f64,
    /// Split into `⌈|Λ|/Λ_max⌉` equal gates instead of only warning.
    pub split: bool,
}

impl Default for ThetaGuard {
    fn default() -> Self {
        Self {
            max_theta: THETA_WARN,
            split: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompileOptions {
    pub max_order: usize,
    pub dt: f64,
    pub repetitions: usize,
    pub postselect: bool,
    pub truncation_dim: usize,
    pub splitting: Splitting,
    pub guard: ThetaGuard,
}

impl CompileOptions {
    pub fn new(max_order: usize, dt: f64, repetitions: usize, truncation_dim: usize) -> Self {
        Self {
            max_order,
            dt,
            repetitions,
            postselect: true,
            truncation_dim,
            splitting: Splitting::LieTrotter,
            guard: ThetaGuard::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
        }
        if !(self.guard.max_theta > 0.0) {
            return Err(Error::InvalidParameter("max_theta must be positive".into()));
        }
        Ok(())
    }
}

/// Trig gates for one step in canonical order, cosine before sine per index.
pub fn trig_gate_params(series: &FourierSeries, dt: f64, guard: &ThetaGuard) -> Vec<TrigGateParams> {
    let mut out = Vec::new();
    for term in series.terms() {
        let mu = series.mu(&term.m);
        for (coef, kind) in [(term.a, TrigKind::Cosine), (term.b, TrigKind::Sine)] {
            if coef == 0.0 {
                continue;
            }
            let lambda = coef * dt;
            let pieces = if (lambda / 2.0).abs() > guard.max_theta {
                if guard.split {
                    (lambda.abs() / (2.0 * guard.max_theta)).ceil() as usize
                } else {
                    warn!(
                        "trig gate at m = {:?} has |theta| = {:.3} > {}; consider a smaller dt or splitting",
                        term.m,
                        (lambda / 2.0).abs(),
                        guard.max_theta
                    );
                    1
                }
            } else {
                1
            };
            for _ in 0..pieces {
                out.push(TrigGateParams::new(
                    mu.clone(),
                    lambda / pieces as f64,
                    kind,
                    series.angles().to_vec(),
                ));
            }
        }
    }
    out
}

/// One step: free evolution, then every trig gate of the series.
pub fn compile_trotter_step(
    series: &FourierSeries,
    frequencies: &[f64],
    dt: f64,
    splitting: Splitting,
    guard: &ThetaGuard,
) -> Result<Vec<GateInstruction>> {
    if frequencies.len() != series.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: series.num_modes(),
            actual: frequencies.len(),
        });
    }
    let free = |duration| GateInstruction::FreeEvolution {
        duration,
        frequencies: frequencies.to_vec(),
    };
    let mut step = Vec::new();
    let free_time = match splitting {
        Splitting::LieTrotter => dt,
        Splitting::Strang => dt / 2.0,
    };
    step.push(free(free_time));
    for params in trig_gate_params(series, dt, guard) {
        step.extend(compile_trig_gate(&params));
    }
    if splitting == Splitting::Strang {
        step.push(free(free_time));
    }
    Ok(step)
}

/// Compiles an already expanded series.
pub fn compile_series_program(
    series: &FourierSeries,
    frequencies: &[f64],
    hamiltonian_digest: String,
    options: &CompileOptions,
) -> Result<GateProgram> {
    options.validate()?;
    let space = ModeSpace::hybrid(options.truncation_dim, series.num_modes())?;
    let step = compile_trotter_step(series, frequencies, options.dt, options.splitting, &options.guard)?;
    let metadata = ProgramMetadata {
        max_order: options.max_order,
        dt: options.dt,
        splitting: options.splitting,
        hamiltonian_digest,
        fused: false,
    };
    GateProgram::new(space, step, options.repetitions, options.postselect, metadata)
}

/// Fourier-expands the potential to order `N_F` and compiles `r` Trotter steps.
pub fn compile_program(ham: &HamiltonianSpec, options: &CompileOptions) -> Result<GateProgram> {
    options.validate()?;
    let series = coefficients(ham.potential(), options.max_order)?;
    compile_series_program(&series, ham.frequencies(), ham.digest(), options)
}
