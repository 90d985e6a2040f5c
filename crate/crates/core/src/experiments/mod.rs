//! Reproducible scenarios driven by TOML configs.
//!
//! A [`ScenarioConfig`] is resolved (every default filled in), lowered to a
//! [`Pipeline`], and run for each configured Fourier order. Outputs are
//! rendered in memory as a [`ScenarioOutput`] and only touch the disk through
//! [`ScenarioOutput::write_to`]. Nothing in the pipeline is random, so equal
//! configs give byte-equal files.
//!
//! Files written by a run of scenario `s`:
//!
//! - `s_nf{N}.csv`: time series of the compiled program against the exact one,
//! - `s_nf{N}.ir`: the gate program,
//! - `s_exact.csv`: the exact reference trace,
//! - `s_infidelity.csv`: infidelity and leakage over time for all orders,
//! - `s_report.toml`: resolved config, per-order summaries and resources,
//! - `two_mode_alpha_sweep.csv`: final infidelity against `α_1` (two-mode only).

mod config;
mod pipeline;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    CustomParams, DoubleWellParams, EstimateParams, InitialState, RunSection, Scenario, ScenarioConfig,
    TwoModeParams,
};
pub use pipeline::{OrderRun, OrderSummary, Pipeline, ScenarioOutput};

use pipeline::{csv_comments, render_csv, run_orders};
use crate::compiler::{resource_estimate, ResourceReport, HADAMARD_NORMALIZATION};
use crate::error::{Error, Result};
use crate::fourier::{reconstruction_error, FourierSeries, Monomial, PotentialSpec, ReconstructionError};
use crate::hilbert::{single_mode_coherent, ModeSpace, StateVector};
use crate::simulator::{run_program, HamiltonianSpec, Schedule};
use crate::text::fmt_f64;

/// Lowers a config to its Hamiltonian, initial state and run settings.
pub fn pipeline(config: &ScenarioConfig) -> Result<Pipeline> {
    let config = config.resolve()?;
    let (ham, initial, populations) = match config.scenario {
        Scenario::DoubleWell => {
            let p = config.double_well.as_ref().expect("resolved");
            let (xi1, xi0) = (p.xi1_over_omega * p.omega, p.xi0_over_omega * p.omega);
            // H_0 carries ω X²/2, so the potential gives that back.
            let terms = vec![Monomial::new(xi1, vec![4]), Monomial::new(-(xi0 + p.omega / 2.0), vec![2])];
            let potential = PotentialSpec::polynomial(terms, vec![p.domain_length.expect("resolved")])?;
            let ham = HamiltonianSpec::new(vec![p.omega], potential)?.with_absorbed_x2(vec![p.omega / 2.0])?;
            let initial = InitialState::Coherent {
                alpha: vec![[p.alpha.expect("resolved"), 0.0]],
            };
            (ham, initial, Vec::new())
        }
        Scenario::TwoMode => {
            let p = config.two_mode.as_ref().expect("resolved");
            let xi = p.xi_over_omega1 * p.omega1;
            let potential = PotentialSpec::polynomial(
                vec![Monomial::new(xi, vec![1, 2])],
                p.domain_lengths.clone().expect("resolved"),
            )?;
            let ham = HamiltonianSpec::new(vec![p.omega1, p.omega2.expect("resolved")], potential)?;
            (ham, p.initial.clone().expect("resolved"), p.populations.clone().expect("resolved"))
        }
        Scenario::Custom => {
            let p = config.custom.as_ref().expect("resolved");
            let potential = PotentialSpec::polynomial(p.terms.clone(), p.domain_lengths.clone().expect("resolved"))?
                .with_angles(p.angles.clone().expect("resolved"))?;
            let ham = HamiltonianSpec::new(p.frequencies.clone(), potential)?
                .with_absorbed_x2(p.absorbed_x2.clone().expect("resolved"))?;
            (ham, p.initial.clone(), p.populations.clone())
        }
    };
    let space = ModeSpace::oscillators(config.run.truncation_dim.expect("resolved"), ham.num_modes())?;
    let initial = initial_state(space, &initial)?;
    Ok(Pipeline::from_config(&config, ham, initial, populations))
}

/// Oscillator-only product state described by `init`.
pub fn initial_state(space: ModeSpace, init: &InitialState) -> Result<StateVector> {
    if init.num_modes() != space.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: space.num_modes(),
            actual: init.num_modes(),
        });
    }
    match init {
        InitialState::Fock { occupation } => StateVector::fock(space, occupation, None),
        InitialState::Coherent { .. } => {
            let mut loss = 0.0f64;
            let mut modes = Vec::new();
            for a in init.alphas().expect("coherent") {
                let (v, l) = single_mode_coherent(space.truncation_dim(), a)?;
                loss = loss.max(l);
                modes.push(v);
            }
            Ok(StateVector::product(space, None, &modes)?.with_truncation_loss(loss))
        }
    }
}

#[derive(Serialize)]
struct Summary {
    scenario: &'static str,
    config_digest: String,
    hamiltonian_digest: String,
    hadamard_normalization: &'static str,
    repetitions: usize,
    dt: f64,
    total_time: f64,
}

#[derive(Serialize)]
struct DoubleWellSummary {
    x0: f64,
    domain_length: f64,
    /// `E_1 - E_0` of the truncated Hamiltonian.
    delta_e1: f64,
    /// `π / ΔE_1`.
    tunneling_time: f64,
    /// First recorded time with exact `⟨X⟩ > 0`.
    exact_crossing_time: Option<f64>,
}

#[derive(Serialize)]
struct TwoModeSummary {
    /// Largest exact population of the second tracked state over the record.
    max_exact_transfer: f64,
    max_exact_transfer_time: f64,
}

#[derive(Serialize)]
struct ReconstructionSummary {
    max_order: usize,
    max_abs: f64,
    rms: f64,
    /// RMS error divided by the potential's RMS on the box.
    relative_rms: f64,
}

#[derive(Serialize)]
struct ReportFile {
    config: ScenarioConfig,
    summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    double_well: Option<DoubleWellSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_mode: Option<TwoModeSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    reconstruction: Vec<ReconstructionSummary>,
    orders: Vec<OrderSummary>,
}

fn summary(config: &ScenarioConfig, ham: &HamiltonianSpec) -> Summary {
    Summary {
        scenario: config.scenario.as_str(),
        config_digest: config.digest(),
        hamiltonian_digest: ham.digest(),
        hadamard_normalization: HADAMARD_NORMALIZATION,
        repetitions: config.run.repetitions.expect("resolved"),
        dt: config.run.dt.expect("resolved"),
        total_time: config.run.total_time.expect("resolved"),
    }
}

fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Config(format!("cannot render report: {e}")))
}

/// Reads the resolved config embedded in a `*_report.toml`.
pub fn config_from_report(text: &str) -> Result<ScenarioConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let config = table
        .get("config")
        .cloned()
        .ok_or_else(|| Error::Config("report has no [config] table".into()))?;
    config.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

fn expect_scenario(config: &ScenarioConfig, scenario: Scenario) -> Result<ScenarioConfig> {
    if config.scenario != scenario {
        return Err(Error::Config(format!(
            "expected a {} config, got {}",
            scenario.as_str(),
            config.scenario.as_str()
        )));
    }
    config.resolve()
}

/// Runs any scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    match config.scenario {
        Scenario::DoubleWell => run_double_well(config),
        Scenario::TwoMode => run_two_mode(config),
        Scenario::Custom => run_custom(config),
    }
}

/// Quartic double well started in the left well.
pub fn run_double_well(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let config = expect_scenario(config, Scenario::DoubleWell)?;
    let pipe = pipeline(&config)?;
    let reference = Arc::new(pipe.reference()?);
    let (runs, mut files, orders) = run_orders(&config, &pipe, &reference, &|_, _| Ok(()))?;
    let p = config.double_well.as_ref().expect("resolved");
    let e = reference.energies();
    let delta_e1 = e[1] - e[0];
    let exact_crossing_time = runs[0]
        .report
        .records
        .iter()
        .find(|r| r.exact_position.as_ref().is_some_and(|x| x[0] > 0.0))
        .map(|r| r.time);
    let report = ReportFile {
        summary: summary(&config, &pipe.hamiltonian),
        double_well: Some(DoubleWellSummary {
            x0: p.x0(),
            domain_length: p.domain_length.expect("resolved"),
            delta_e1,
            tunneling_time: PI / delta_e1,
            exact_crossing_time,
        }),
        two_mode: None,
        reconstruction: Vec::new(),
        orders,
        config: config.clone(),
    };
    files.insert("double_well_report.toml".into(), to_toml(&report)?);
    Ok(ScenarioOutput { config, runs, files })
}

/// Two modes coupled by `ξ X_1 X_2²`, plus the coherent-state sweep over `α_1`.
pub fn run_two_mode(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let config = expect_scenario(config, Scenario::TwoMode)?;
    let pipe = pipeline(&config)?;
    let reference = Arc::new(pipe.reference()?);
    let (runs, mut files, orders) = run_orders(&config, &pipe, &reference, &|_, _| Ok(()))?;

    let (mut best, mut best_time) = (0.0f64, 0.0);
    for rec in &runs[0].report.records {
        if let Some(p) = rec.exact_populations.as_ref().and_then(|p| p.get(1)) {
            if *p > best {
                (best, best_time) = (*p, rec.time);
            }
        }
    }

    let p = config.two_mode.as_ref().expect("resolved");
    let grid = p.alpha_grid.clone().expect("resolved");
    if !grid.is_empty() {
        let rows = alpha_sweep(&pipe, &runs, &reference, &grid)?;
        let header: Vec<String> = ["alpha_1", "max_order", "infidelity", "leakage", "leakage_flag"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let comments = csv_comments(&config, &pipe.hamiltonian, &[("initial", "coherent |alpha_1, 0>".into())]);
        files.insert("two_mode_alpha_sweep.csv".into(), render_csv(&comments, &header, &rows)?);
    }
    let report = ReportFile {
        summary: summary(&config, &pipe.hamiltonian),
        double_well: None,
        two_mode: Some(TwoModeSummary {
            max_exact_transfer: best,
            max_exact_transfer_time: best_time,
        }),
        reconstruction: Vec::new(),
        orders,
        config: config.clone(),
    };
    files.insert("two_mode_report.toml".into(), to_toml(&report)?);
    Ok(ScenarioOutput { config, runs, files })
}

/// Final-time infidelity from `|α_1, 0⟩` for every `(α_1, N_F)` pair.
fn alpha_sweep(
    pipe: &pipeline::Pipeline,
    runs: &[OrderRun],
    reference: &Arc<crate::simulator::ExactPropagator>,
    grid: &[f64],
) -> Result<Vec<Vec<String>>> {
    let space = ModeSpace::oscillators(pipe.compile.truncation_dim, 2)?;
    let mut options = pipe.run_options(reference.clone(), Schedule::final_only(pipe.compile.repetitions));
    options.populations.clear();
    let jobs: Vec<(f64, &OrderRun)> = grid.iter().flat_map(|&a| runs.iter().map(move |r| (a, r))).collect();
    let rows: Vec<Result<Vec<String>>> = jobs
        .par_iter()
        .map(|&(alpha, run)| {
            let init = InitialState::Coherent {
                alpha: vec![[alpha, 0.0], [0.0, 0.0]],
            };
            let initial = initial_state(space, &init)?;
            let (report, _) = run_program(&run.program, &initial, &options)?;
            let inf = report.final_infidelity().unwrap_or(f64::NAN);
            Ok(vec![
                fmt_f64(alpha),
                run.max_order.to_string(),
                fmt_f64(inf),
                fmt_f64(report.max_leakage),
                u8::from(!report.trusted).to_string(),
            ])
        })
        .collect();
    rows.into_iter().collect()
}

fn potential_scale(spec: &PotentialSpec, samples: usize) -> Result<ReconstructionError> {
    let zero = FourierSeries::from_terms(
        spec.domain_lengths().to_vec(),
        spec.angles().to_vec(),
        0,
        0.0,
        Vec::new(),
    )?;
    reconstruction_error(&zero, spec, samples)
}

/// User-supplied polynomial potential, refused when its Fourier series is too coarse.
pub fn run_custom(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let config = expect_scenario(config, Scenario::Custom)?;
    let pipe = pipeline(&config)?;
    let p = config.custom.as_ref().expect("resolved");
    let scale = potential_scale(pipe.hamiltonian.potential(), p.reconstruction_samples)?;
    let relative = |e: &ReconstructionError| if scale.rms > 0.0 { e.rms / scale.rms } else { e.rms };
    let bound = p.reconstruction_bound;
    let check = |_nf: usize, e: &ReconstructionError| {
        let rel = relative(e);
        if rel > bound {
            return Err(Error::Reconstruction { error: rel, bound });
        }
        Ok(())
    };
    let reference = Arc::new(pipe.reference()?);
    let (runs, mut files, orders) = run_orders(&config, &pipe, &reference, &check)?;
    let reconstruction = runs
        .iter()
        .map(|r| ReconstructionSummary {
            max_order: r.max_order,
            max_abs: r.reconstruction.max_abs,
            rms: r.reconstruction.rms,
            relative_rms: relative(&r.reconstruction),
        })
        .collect();
    let report = ReportFile {
        summary: summary(&config, &pipe.hamiltonian),
        double_well: None,
        two_mode: None,
        reconstruction,
        orders,
        config: config.clone(),
    };
    files.insert("custom_report.toml".into(), to_toml(&report)?);
    Ok(ScenarioOutput { config, runs, files })
}

#[derive(Serialize)]
struct EstimateEntry {
    max_order: usize,
    eta: f64,
    native_order: u32,
    modes_per_term: u32,
    #[serde(flatten)]
    resources: ResourceReport,
}

#[derive(Serialize)]
struct EstimateFile {
    config: ScenarioConfig,
    summary: Summary,
    estimates: Vec<EstimateEntry>,
}

/// Closed-form resource counts for every configured order, without simulating.
pub fn estimate(config: &ScenarioConfig) -> Result<(ScenarioOutput, Vec<(usize, ResourceReport)>)> {
    let config = config.resolve()?;
    let pipe = pipeline(&config)?;
    let mut out = Vec::new();
    let mut entries = Vec::new();
    for &nf in &pipe.orders {
        let series = pipe.series(nf)?;
        let native = pipe.native_model(&config, &series);
        let r = resource_estimate(&pipe.hamiltonian, &pipe.options_for(nf), &native)?;
        entries.push(EstimateEntry {
            max_order: nf,
            eta: native.eta,
            native_order: native.order,
            modes_per_term: native.modes_per_term,
            resources: r.clone(),
        });
        out.push((nf, r));
    }
    let file = EstimateFile {
        summary: summary(&config, &pipe.hamiltonian),
        estimates: entries,
        config: config.clone(),
    };
    let mut files = BTreeMap::new();
    files.insert(format!("{}_estimate.toml", config.scenario.as_str()), to_toml(&file)?);
    Ok((
        ScenarioOutput {
            config,
            runs: Vec::new(),
            files,
        },
        out,
    ))
}

/// Fourier tables and gate programs for every configured order, without simulating.
pub fn decompose(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let config = config.resolve()?;
    let pipe = pipeline(&config)?;
    let name = config.scenario.as_str();
    let mut files = BTreeMap::new();
    for &nf in &pipe.orders {
        files.insert(format!("{name}_nf{nf}_fourier.txt"), pipe.series(nf)?.to_table());
        files.insert(format!("{name}_nf{nf}.ir"), pipe.compile(nf)?.to_ir());
    }
    Ok(ScenarioOutput {
        config,
        runs: Vec::new(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(text: &str) -> ScenarioConfig {
        ScenarioConfig::from_toml(text).unwrap()
    }

    #[test]
    fn double_well_hamiltonian_terms() {
        let pipe = pipeline(&ScenarioConfig::defaults(Scenario::DoubleWell)).unwrap();
        let m = pipe.hamiltonian.potential().monomials().unwrap();
        assert_eq!(m[0], Monomial::new(0.35, vec![4]));
        assert!((m[1].coefficient + 0.35 / 8.0 + 0.5).abs() < 1e-15);
        assert_eq!(pipe.hamiltonian.absorbed_x2(), &[0.5]);
    }

    #[test]
    fn short_double_well_is_deterministic_and_round_trips() {
        let cfg = small("scenario = \"double_well\"\n[run]\norders = [2]\ntruncation_dim = 24\nrepetitions = 20\ntotal_time = 2.0\nsamples = 5\n");
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a.files, b.files);
        let embedded = config_from_report(&a.files["double_well_report.toml"]).unwrap();
        assert_eq!(embedded, a.config);
        assert_eq!(run_scenario(&embedded).unwrap().files, a.files);
        for name in ["double_well_nf2.csv", "double_well_nf2.ir", "double_well_exact.csv", "double_well_infidelity.csv"] {
            assert!(a.files.contains_key(name), "{name}");
        }
    }

    #[test]
    fn scenario_mismatch_is_rejected() {
        let cfg = ScenarioConfig::defaults(Scenario::TwoMode);
        assert!(run_double_well(&cfg).is_err());
    }

    #[test]
    fn decompose_and_estimate_outputs() {
        let cfg = ScenarioConfig::defaults(Scenario::DoubleWell);
        let d = decompose(&cfg).unwrap();
        assert_eq!(d.files.len(), 6);
        let (e, reports) = estimate(&cfg).unwrap();
        assert!(e.files.contains_key("double_well_estimate.toml"));
        assert_eq!(reports.len(), 3);
    }
}
