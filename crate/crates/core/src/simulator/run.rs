use std::sync::Arc;
use std::time::Instant;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use super::engine::CompiledStep;
use super::exact::{strip_qubit, ExactPropagator, DEFAULT_LEAKAGE_THRESHOLD};
use super::hamiltonian::HamiltonianSpec;
use super::report::{GateCounts, RunReport, StepRecord};
use crate::compiler::{compile_program, fuse_displacements, CompileOptions, GateProgram, HADAMARD_NORMALIZATION};
use crate::error::{Error, Result};
use crate::hilbert::{
    apply_mode_matrix, single_mode_quadrature, CMatrix, CVector, ModeSpace, Qubit, StateVector,
    DEFAULT_LEAKAGE_BUFFER,
};

/// Default number of evenly spaced samples over a run.
pub const DEFAULT_SAMPLES: usize = 200;
/// Default abort threshold for the postselection success probability.
pub const DEFAULT_SUCCESS_FLOOR: f64 = 1e-6;

/// Step indices (in `0..=r`) at which observables are recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule(Vec<usize>);

impl Schedule {
    /// `samples` points spread evenly over `0..=repetitions`, endpoints included.
    pub fn evenly(repetitions: usize, samples: usize) -> Self {
        if samples <= 1 || repetitions == 0 {
            return Self(vec![repetitions]);
        }
        let mut steps: Vec<usize> = (0..samples)
            .map(|i| ((i as f64) * repetitions as f64 / (samples - 1) as f64).round() as usize)
            .collect();
        steps.dedup();
        Self(steps)
    }

    pub fn final_only(repetitions: usize) -> Self {
        Self(vec![repetitions])
    }

    pub fn from_steps(mut steps: Vec<usize>) -> Self {
        steps.sort_unstable();
        steps.dedup();
        Self(steps)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// `None` means [`DEFAULT_SAMPLES`] evenly spaced samples.
    pub schedule: Option<Schedule>,
    /// Fock occupations whose populations are recorded.
    pub populations: Vec<Vec<usize>>,
    pub success_floor: f64,
    pub leakage_buffer: usize,
    pub leakage_threshold: f64,
    /// Exact dynamics to compare against at every recorded step.
    pub reference: Option<Arc<ExactPropagator>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            schedule: None,
            populations: Vec::new(),
            success_floor: DEFAULT_SUCCESS_FLOOR,
            leakage_buffer: DEFAULT_LEAKAGE_BUFFER,
            leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD,
            reference: None,
        }
    }
}

struct Observer<'a> {
    space: ModeSpace,
    osc: ModeSpace,
    x: CMatrix,
    populations: Vec<usize>,
    options: &'a RunOptions,
    reference: Option<(&'a ExactPropagator, CVector)>,
    scratch: Vec<Complex64>,
}

impl<'a> Observer<'a> {
    fn new(space: ModeSpace, options: &'a RunOptions, initial: &StateVector) -> Result<Self> {
        let osc = space.without_qubit();
        let populations = options
            .populations
            .iter()
            .map(|occ| osc.occupation_index(occ))
            .collect::<Result<Vec<_>>>()?;
        let reference = match &options.reference {
            Some(p) => Some((p.as_ref(), p.project(&strip_qubit(initial)?)?)),
            None => None,
        };
        Ok(Self {
            space,
            osc,
            x: single_mode_quadrature(space.truncation_dim(), 0.0),
            populations,
            options,
            reference,
            scratch: Vec::new(),
        })
    }

    fn positions(&mut self, amps: &[Complex64]) -> Vec<f64> {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        (0..self.osc.num_modes())
            .map(|n| {
                let mut applied = amps.to_vec();
                apply_mode_matrix(&mut applied, &self.osc, n, &self.x, &mut self.scratch);
                let v: Complex64 = amps.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum();
                v.re / norm
            })
            .collect()
    }

    fn record(&mut self, psi: &[Complex64], step: usize, time: f64, norm_drift: &mut f64) -> Result<StepRecord> {
        let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        *norm_drift = norm_drift.max((total.sqrt() - 1.0).abs());
        let od = self.osc.dim();
        let (projected, success, failure) = if self.space.qubit_present() {
            let up: f64 = psi[..od].iter().map(|z| z.norm_sqr()).sum();
            let down: f64 = psi[od..].iter().map(|z| z.norm_sqr()).sum();
            (&psi[..od], up / total, down / total)
        } else {
            (psi, 1.0, 0.0)
        };
        let weight: f64 = projected.iter().map(|z| z.norm_sqr()).sum();
        if weight == 0.0 {
            return Err(Error::PostselectionFailed {
                probability: 0.0,
                floor: self.options.success_floor,
            });
        }
        let state = StateVector::normalize(self.osc, CVector::from_column_slice(projected))?;
        let leakage = state.leakage(self.options.leakage_buffer);
        let position = self.positions(projected);
        let amps = state.amplitudes();
        let populations = self.populations.iter().map(|&i| amps[i].norm_sqr()).collect();
        let (fidelity, exact_position, exact_populations) = match &self.reference {
            Some((prop, coords)) => {
                let exact = prop.evolve_projected(coords, time);
                let overlap = exact.dotc(amps).norm_sqr() / exact.norm_squared();
                let ex: Vec<Complex64> = exact.iter().copied().collect();
                let pops = self.populations.iter().map(|&i| ex[i].norm_sqr() / exact.norm_squared()).collect();
                (Some(overlap.clamp(0.0, 1.0)), Some(self.positions(&ex)), Some(pops))
            }
            None => (None, None, None),
        };
        Ok(StepRecord {
            step,
            time,
            position,
            populations,
            success_probability: success,
            failure_probability: failure,
            leakage,
            fidelity,
            exact_position,
            exact_populations,
        })
    }
}

/// Prepares the hybrid initial amplitudes for `program`.
fn initial_amplitudes(program: &GateProgram, initial: &StateVector) -> Result<CVector> {
    let space = program.space();
    let given = initial.space();
    if given.num_modes() != space.num_modes() || given.truncation_dim() != space.truncation_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: given.dim(),
        });
    }
    if !initial.is_normalized() {
        return Err(Error::InvalidParameter("initial state must be normalized".into()));
    }
    let state = match (given.qubit_present(), space.qubit_present()) {
        (true, true) => initial.clone(),
        (false, true) => initial.attach_qubit(Qubit::Up)?,
        (false, false) => initial.clone(),
        (true, false) => return Err(Error::InvalidParameter("program has no qubit".into())),
    };
    if program.postselect() && state.qubit_component(Qubit::Down)?.norm() > 1e-12 {
        return Err(Error::InvalidParameter(
            "postselected programs must start with the qubit in |up>".into(),
        ));
    }
    Ok(state.into_amplitudes())
}

/// Executes `program` from `initial`, recording observables on the schedule.
///
/// Observables are taken on the `|↑⟩`-projected, renormalized oscillator
/// state. Returns the report and the final state, which is oscillator-only
/// after postselection and hybrid otherwise.
pub fn run_program(
    program: &GateProgram,
    initial: &StateVector,
    options: &RunOptions,
) -> Result<(RunReport, StateVector)> {
    let started = Instant::now();
    let space = program.space();
    let mut psi: Vec<Complex64> = initial_amplitudes(program, initial)?.iter().copied().collect();
    let r = program.repetitions();
    let schedule = options.schedule.clone().unwrap_or_else(|| Schedule::evenly(r, DEFAULT_SAMPLES));
    if let Some(&bad) = schedule.steps().iter().find(|&&s| s > r) {
        return Err(Error::InvalidParameter(format!("scheduled step {bad} exceeds {r} repetitions")));
    }
    let step_time = if r > 0 { program.total_time() / r as f64 } else { 0.0 };
    let step = CompiledStep::new(space, program.step())?;
    let mut observer = Observer::new(space, options, initial)?;
    let mut records = Vec::with_capacity(schedule.steps().len());
    let mut scratch = Vec::new();
    let mut norm_drift = 0.0f64;
    let mut next = schedule.steps().iter().peekable();
    for s in 0..=r {
        if s > 0 {
            step.apply(&mut psi, &mut scratch);
        }
        if next.peek() == Some(&&s) {
            next.next();
            records.push(observer.record(&psi, s, s as f64 * step_time, &mut norm_drift)?);
        }
    }
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    norm_drift = norm_drift.max((total.sqrt() - 1.0).abs());
    let od = space.oscillator_dim();
    let (final_state, success, failure) = if program.postselect() {
        let up: f64 = psi[..od].iter().map(|z| z.norm_sqr()).sum();
        let down: f64 = psi[od..].iter().map(|z| z.norm_sqr()).sum();
        let (p, q) = (up / total, down / total);
        if !(p >= options.success_floor) {
            return Err(Error::PostselectionFailed {
                probability: p,
                floor: options.success_floor,
            });
        }
        let state = StateVector::normalize(space.without_qubit(), CVector::from_column_slice(&psi[..od]))?;
        (state, p, q)
    } else {
        (StateVector::normalize(space, CVector::from_vec(psi))?, 1.0, 0.0)
    };
    let final_leakage = final_state.leakage(options.leakage_buffer);
    let max_leakage = records.iter().map(|r| r.leakage).fold(final_leakage, f64::max);
    let trusted = max_leakage <= options.leakage_threshold;
    if !trusted {
        warn!("leakage {max_leakage:e} exceeds {:e}; results near the truncation edge", options.leakage_threshold);
    }
    let final_fidelity = records.last().filter(|rec| rec.step == r).and_then(|rec| rec.fidelity);
    let final_fidelity = match (final_fidelity, &observer.reference) {
        (Some(f), _) => Some(f),
        (None, Some((prop, coords))) => {
            let exact = prop.evolve_projected(coords, r as f64 * step_time);
            let osc = strip_qubit(&final_state).unwrap_or_else(|_| final_state.clone());
            Some((exact.dotc(osc.amplitudes()).norm_sqr() / exact.norm_squared()).clamp(0.0, 1.0))
        }
        _ => None,
    };
    let report = RunReport {
        records,
        repetitions: r,
        total_time: r as f64 * step_time,
        success_probability: success,
        failure_probability: failure,
        final_fidelity,
        final_leakage,
        max_leakage,
        leakage_threshold: options.leakage_threshold,
        trusted,
        norm_drift,
        gate_counts: GateCounts::of(program),
        hadamard_normalization: HADAMARD_NORMALIZATION.to_string(),
        program_digest: program.content_digest(),
        position_labels: (1..=space.num_modes()).map(|n| format!("x_{n}")).collect(),
        population_labels: options
            .populations
            .iter()
            .map(|o| format!("pop_{}", o.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("_")))
            .collect(),
        wall_time: started.elapsed(),
    };
    Ok((report, final_state))
}

/// One row of an infidelity sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub max_order: usize,
    pub step: usize,
    pub time: f64,
    pub infidelity: f64,
    pub leakage: f64,
    pub flagged: bool,
}

/// Compiles and runs the program for each `N_F`, comparing against the exact
/// evolution at every recorded step. Jobs run concurrently; rows come back
/// ordered by position in `orders`, then by step.
pub fn infidelity_sweep(
    ham: &HamiltonianSpec,
    orders: &[usize],
    options: &CompileOptions,
    initial: &StateVector,
    run: &RunOptions,
    fuse: bool,
) -> Result<(Vec<SweepRow>, Vec<(usize, RunReport)>)> {
    let mut run = run.clone();
    if run.reference.is_none() {
        let space = ModeSpace::oscillators(options.truncation_dim, ham.num_modes())?;
        run.reference = Some(Arc::new(ExactPropagator::new(ham, &space)?));
    }
    let results: Vec<Result<(usize, RunReport)>> = orders
        .par_iter()
        .map(|&nf| {
            let mut opts = options.clone();
            opts.max_order = nf;
            let mut program = compile_program(ham, &opts)?;
            if fuse {
                program = fuse_displacements(&program);
            }
            let (report, _) = run_program(&program, initial, &run)?;
            Ok((nf, report))
        })
        .collect();
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (nf, report) in &reports {
        for rec in &report.records {
            rows.push(SweepRow {
                max_order: *nf,
                step: rec.step,
                time: rec.time,
                infidelity: 1.0 - rec.fidelity.unwrap_or(f64::NAN),
                leakage: rec.leakage,
                flagged: rec.leakage > report.leakage_threshold,
            });
        }
    }
    Ok((rows, reports))
}
