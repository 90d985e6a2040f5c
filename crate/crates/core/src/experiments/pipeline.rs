use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ScenarioConfig;
use crate::compiler::{
    compile_program, fuse_displacements, resource_estimate, CompileOptions, GateProgram, NativeModel, ResourceReport,
    ThetaGuard, HADAMARD_NORMALIZATION,
};
use crate::error::{Error, Result};
use crate::fourier::{coefficients, reconstruction_error, FourierSeries, ReconstructionError};
use crate::hilbert::{ModeSpace, StateVector};
use crate::simulator::{run_program, ExactPropagator, HamiltonianSpec, RunOptions, RunReport, Schedule};
use crate::text::fmt_f64;

/// Everything a scenario needs once its config has been lowered.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub name: String,
    pub hamiltonian: HamiltonianSpec,
    /// Oscillator-only initial state.
    pub initial: StateVector,
    pub orders: Vec<usize>,
    /// Compile options; `max_order` is overwritten per order.
    pub compile: CompileOptions,
    pub samples: usize,
    pub populations: Vec<Vec<usize>>,
    pub success_floor: f64,
    pub leakage_threshold: f64,
    pub leakage_buffer: usize,
    pub fail_on_leakage: bool,
    pub fuse: bool,
}

impl Pipeline {
    pub(crate) fn from_config(
        config: &ScenarioConfig,
        hamiltonian: HamiltonianSpec,
        initial: StateVector,
        populations: Vec<Vec<usize>>,
    ) -> Self {
        let run = &config.run;
        let mut compile = CompileOptions::new(
            0,
            run.dt.expect("resolved"),
            run.repetitions.expect("resolved"),
            run.truncation_dim.expect("resolved"),
        );
        compile.splitting = run.splitting;
        compile.guard = ThetaGuard {
            max_theta: run.max_theta,
            split: run.split_large_theta,
        };
        Self {
            name: config.scenario.as_str().to_string(),
            hamiltonian,
            initial,
            orders: config.orders().to_vec(),
            compile,
            samples: run.samples,
            populations,
            success_floor: run.success_floor,
            leakage_threshold: run.leakage_threshold,
            leakage_buffer: run.leakage_buffer,
            fail_on_leakage: run.fail_on_leakage,
            fuse: run.fuse,
        }
    }

    pub fn options_for(&self, max_order: usize) -> CompileOptions {
        CompileOptions {
            max_order,
            ..self.compile.clone()
        }
    }

    pub fn compile(&self, max_order: usize) -> Result<GateProgram> {
        let program = compile_program(&self.hamiltonian, &self.options_for(max_order))?;
        Ok(if self.fuse { fuse_displacements(&program) } else { program })
    }

    pub fn series(&self, max_order: usize) -> Result<FourierSeries> {
        coefficients(self.hamiltonian.potential(), max_order)
    }

    pub fn reference(&self) -> Result<ExactPropagator> {
        let space = ModeSpace::oscillators(self.compile.truncation_dim, self.hamiltonian.num_modes())?;
        ExactPropagator::new(&self.hamiltonian, &space)
    }

    pub(crate) fn run_options(&self, reference: Arc<ExactPropagator>, schedule: Schedule) -> RunOptions {
        RunOptions {
            schedule: Some(schedule),
            populations: self.populations.clone(),
            success_floor: self.success_floor,
            leakage_buffer: self.leakage_buffer,
            leakage_threshold: self.leakage_threshold,
            reference: Some(reference),
        }
    }

    pub fn native_model(&self, config: &ScenarioConfig, series: &FourierSeries) -> NativeModel {
        let e = config.estimate.clone().unwrap_or_default();
        NativeModel {
            eta: e.eta,
            order: e.order,
            modes_per_term: e.modes_per_term.unwrap_or(series.modes_per_term().max(1) as u32),
        }
    }
}

/// Simulation of one Fourier order.
#[derive(Clone, Debug)]
pub struct OrderRun {
    pub max_order: usize,
    pub program: GateProgram,
    pub report: RunReport,
    pub reconstruction: ReconstructionError,
}

/// Per-order entry of the summary report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderSummary {
    pub max_order: usize,
    pub cosine_terms: usize,
    pub sine_terms: usize,
    pub final_infidelity: f64,
    pub reconstruction_max_abs: f64,
    pub reconstruction_rms: f64,
    pub run: RunReport,
    pub resources: ResourceReport,
}

/// Results of a scenario, with every output file rendered in memory.
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    /// Fully resolved config the outputs were produced from.
    pub config: ScenarioConfig,
    pub runs: Vec<OrderRun>,
    /// File name to contents.
    pub files: BTreeMap<String, String>,
}

impl ScenarioOutput {
    /// Writes every file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }

    pub fn run(&self, max_order: usize) -> Option<&OrderRun> {
        self.runs.iter().find(|r| r.max_order == max_order)
    }

    pub fn report_name(&self) -> String {
        format!("{}_report.toml", self.config.scenario.as_str())
    }
}

/// Comment lines heading every CSV file.
pub(crate) fn csv_comments(config: &ScenarioConfig, ham: &HamiltonianSpec, extra: &[(&str, String)]) -> Vec<String> {
    let mut c = vec![
        format!("scenario = {}", config.scenario.as_str()),
        format!("config_digest = {}", config.digest()),
        format!("hamiltonian_digest = {}", ham.digest()),
        format!("hadamard = {HADAMARD_NORMALIZATION}"),
    ];
    c.extend(extra.iter().map(|(k, v)| format!("{k} = {v}")));
    c
}

pub(crate) fn render_csv(comments: &[String], header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut buf = Vec::new();
    for c in comments {
        buf.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Compiles and runs every order concurrently, then renders the common files.
///
/// `check` sees each order's reconstruction error before anything is simulated.
pub(crate) fn run_orders(
    config: &ScenarioConfig,
    pipeline: &Pipeline,
    reference: &Arc<ExactPropagator>,
    check: &(dyn Fn(usize, &ReconstructionError) -> Result<()> + Sync),
) -> Result<(Vec<OrderRun>, BTreeMap<String, String>, Vec<OrderSummary>)> {
    let r = pipeline.compile.repetitions;
    let schedule = Schedule::evenly(r, pipeline.samples);
    let options = pipeline.run_options(reference.clone(), schedule);
    let samples = match config.custom.as_ref() {
        Some(c) => c.reconstruction_samples,
        None => 64,
    };
    let runs: Vec<Result<(OrderRun, ResourceReport)>> = pipeline
        .orders
        .par_iter()
        .map(|&nf| {
            let series = pipeline.series(nf)?;
            let reconstruction = reconstruction_error(&series, pipeline.hamiltonian.potential(), samples)?;
            check(nf, &reconstruction)?;
            let program = pipeline.compile(nf)?;
            let native = pipeline.native_model(config, &series);
            let resources = resource_estimate(&pipeline.hamiltonian, &pipeline.options_for(nf), &native)?;
            let (report, _) = run_program(&program, &pipeline.initial, &options)?;
            Ok((
                OrderRun {
                    max_order: nf,
                    program,
                    report,
                    reconstruction,
                },
                resources,
            ))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    if pipeline.fail_on_leakage {
        if let Some((run, _)) = runs.iter().find(|(run, _)| !run.report.trusted) {
            return Err(Error::Leakage {
                leakage: run.report.max_leakage,
                threshold: run.report.leakage_threshold,
            });
        }
    }

    let name = &pipeline.name;
    let ham = &pipeline.hamiltonian;
    let mut files = BTreeMap::new();
    let mut summaries = Vec::new();
    for (run, resources) in &runs {
        let nf = run.max_order;
        let comments = csv_comments(
            config,
            ham,
            &[("max_order", nf.to_string()), ("program_digest", run.program.content_digest())],
        );
        let mut buf = Vec::new();
        run.report.write_csv(&mut buf, &comments)?;
        files.insert(format!("{name}_nf{nf}.csv"), String::from_utf8(buf).expect("utf-8"));
        files.insert(format!("{name}_nf{nf}.ir"), run.program.to_ir());
        summaries.push(OrderSummary {
            max_order: nf,
            cosine_terms: resources.cosine_terms,
            sine_terms: resources.sine_terms,
            final_infidelity: run.report.final_infidelity().unwrap_or(f64::NAN),
            reconstruction_max_abs: run.reconstruction.max_abs,
            reconstruction_rms: run.reconstruction.rms,
            run: run.report.clone(),
            resources: resources.clone(),
        });
    }
    let runs: Vec<OrderRun> = runs.into_iter().map(|(run, _)| run).collect();

    // Exact trace, taken from the reference columns of the first run.
    let first = &runs[0].report;
    let mut header = vec!["step".to_string(), "time".to_string()];
    header.extend(first.position_labels.iter().cloned());
    header.extend(first.population_labels.iter().cloned());
    header.push("leakage".into());
    let threshold = pipeline.leakage_threshold;
    let coords = reference.project(&pipeline.initial)?;
    let exact_rows: Vec<Vec<String>> = first
        .records
        .iter()
        .map(|rec| {
            let state = reference.evolve_projected(&coords, rec.time);
            let leak = StateVector::unnormalized(reference.space(), state).leakage(pipeline.leakage_buffer);
            let mut row = vec![rec.step.to_string(), fmt_f64(rec.time)];
            row.extend(rec.exact_position.iter().flatten().map(|v| fmt_f64(*v)));
            row.extend(rec.exact_populations.iter().flatten().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(leak));
            row
        })
        .collect();
    let comments = csv_comments(config, ham, &[("reference", "exact diagonalization".into())]);
    files.insert(format!("{name}_exact.csv"), render_csv(&comments, &header, &exact_rows)?);

    // Long-format infidelity table over all orders.
    let header: Vec<String> = ["max_order", "step", "time", "infidelity", "leakage", "leakage_flag"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for run in &runs {
        for rec in &run.report.records {
            let f = rec.fidelity.unwrap_or(f64::NAN);
            rows.push(vec![
                run.max_order.to_string(),
                rec.step.to_string(),
                fmt_f64(rec.time),
                fmt_f64(1.0 - f),
                fmt_f64(rec.leakage),
                u8::from(rec.leakage > threshold).to_string(),
            ]);
        }
    }
    let comments = csv_comments(config, ham, &[]);
    files.insert(format!("{name}_infidelity.csv"), render_csv(&comments, &header, &rows)?);
    Ok((runs, files, summaries))
}
