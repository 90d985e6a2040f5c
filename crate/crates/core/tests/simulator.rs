mod common;

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use bosonic_synth::compiler::{fuse_displacements, GateInstruction, GateProgram, ProgramMetadata, Splitting};
use bosonic_synth::experiments::{initial_state, pipeline, InitialState, Scenario, ScenarioConfig};
use bosonic_synth::fourier::{coefficients, Monomial, PotentialSpec};
use bosonic_synth::hilbert::{coherent_state, fidelity, CVector, ModeSpace, StateVector};
use bosonic_synth::simulator::{
    exact_reference, infidelity_sweep, run_exact_trig_gates, run_program, ExactPropagator, HamiltonianSpec,
    RunOptions, Schedule,
};
use common::*;
use num_complex::Complex64;

fn free_program(space: ModeSpace, dt: f64, omega: f64, r: usize) -> GateProgram {
    let meta = ProgramMetadata {
        max_order: 0,
        dt,
        splitting: Splitting::LieTrotter,
        hamiltonian_digest: String::new(),
        fused: false,
    };
    let step = vec![GateInstruction::FreeEvolution {
        duration: dt,
        frequencies: vec![omega],
    }];
    GateProgram::new(space, step, r, false, meta).unwrap()
}

#[test]
fn empty_program_returns_initial_state() {
    let space = ModeSpace::hybrid(10, 1).unwrap();
    let psi = coherent_state(space, 0, Complex64::new(0.5, 0.2)).unwrap();
    let (report, out) = run_program(&GateProgram::empty(space), &psi, &RunOptions::default()).unwrap();
    assert_eq!(report.success_probability, 1.0);
    assert!((fidelity(&out, &psi).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn free_evolution_rotates_coherent_state() {
    let space = ModeSpace::oscillators(40, 1).unwrap();
    let alpha = Complex64::from_polar(1.2, 0.4);
    let (omega, dt, r) = (1.3, 0.05, 120);
    let psi = coherent_state(space, 0, alpha).unwrap();
    let options = RunOptions {
        schedule: Some(Schedule::evenly(r, 25)),
        ..RunOptions::default()
    };
    let (report, _) = run_program(&free_program(space, dt, omega, r), &psi, &options).unwrap();
    for rec in &report.records {
        let expected = SQRT_2 * alpha.norm() * (omega * rec.time - alpha.arg()).cos();
        assert!((rec.position[0] - expected).abs() < 1e-9, "t = {}", rec.time);
    }
}

fn harmonic(omega: f64, l: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(vec![omega], PotentialSpec::zero(vec![l]).unwrap()).unwrap()
}

#[test]
fn exact_reference_trivial_times() {
    let space = ModeSpace::oscillators(30, 1).unwrap();
    let psi = coherent_state(space, 0, Complex64::new(1.0, -0.5)).unwrap();
    let ham = HamiltonianSpec::new(
        vec![1.0],
        PotentialSpec::polynomial(vec![Monomial::new(0.1, vec![4])], vec![6.0]).unwrap(),
    )
    .unwrap();
    let at0 = exact_reference(&ham, 0.0, &psi).unwrap();
    assert!((fidelity(&at0.state, &psi).unwrap() - 1.0).abs() < 1e-12);
    let omega = 0.7;
    let period = exact_reference(&harmonic(omega, 6.0), 2.0 * PI / omega, &psi).unwrap();
    assert!((fidelity(&period.state, &psi).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn double_well_crossing_follows_level_splitting() {
    let pipe = pipeline(&ScenarioConfig::defaults(Scenario::DoubleWell)).unwrap();
    let prop = pipe.reference().unwrap();
    let e = prop.energies();
    let half_period = PI / (e[1] - e[0]);
    let x = common::function_of_x(64, |q| Complex64::new(q, 0.0));
    let coords = prop.project(&pipe.initial).unwrap();
    let mean_x = |t: f64| {
        let s = prop.evolve_projected(&coords, t);
        (s.dotc(&(&x * &s))).re
    };
    assert!((mean_x(0.0) + 0.25).abs() < 1e-12);
    // ⟨X⟩ ≈ -X_0 cos(ΔE_1 t): zero at a quarter period, right well at half a period
    let dt = half_period / 400.0;
    let crossing = (0..2000).map(|k| k as f64 * dt).find(|&t| mean_x(t) > 0.0).unwrap();
    assert!(crossing < 20.0 * PI);
    let quarter = half_period / 2.0;
    assert!((crossing - quarter).abs() < 0.1 * quarter, "crossing {crossing}, quarter period {quarter}");
    assert!(mean_x(half_period) > 0.0);
}

#[test]
fn single_order_sweep_has_one_row_per_time() {
    let pipe = pipeline(
        &ScenarioConfig::from_toml(
            "scenario = \"double_well\"\n[run]\ntruncation_dim = 24\nrepetitions = 30\ntotal_time = 3.0\n",
        )
        .unwrap(),
    )
    .unwrap();
    let options = RunOptions {
        schedule: Some(Schedule::evenly(30, 7)),
        ..RunOptions::default()
    };
    let (rows, reports) =
        infidelity_sweep(&pipe.hamiltonian, &[4], &pipe.options_for(4), &pipe.initial, &options, false).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(rows.len(), 7);
    let mut times: Vec<f64> = rows.iter().map(|r| r.time).collect();
    times.dedup();
    assert_eq!(times.len(), 7);
    for r in &rows {
        assert!(r.infidelity >= -1e-15 && r.infidelity <= 1.0 && r.leakage >= 0.0);
    }
}

#[test]
fn fused_and_unfused_runs_agree() {
    let pipe = pipeline(&ScenarioConfig::defaults(Scenario::DoubleWell)).unwrap();
    let program = pipe.compile(4).unwrap();
    let fused = fuse_displacements(&program);
    assert!(fused.conditional_displacement_count() < program.conditional_displacement_count());
    let options = RunOptions {
        schedule: Some(Schedule::final_only(500)),
        ..RunOptions::default()
    };
    let (_, a) = run_program(&program, &pipe.initial, &options).unwrap();
    let (_, b) = run_program(&fused, &pipe.initial, &options).unwrap();
    assert!(1.0 - fidelity(&a, &b).unwrap() < 1e-10);
}

#[test]
fn success_probability_approaches_one_as_dt_shrinks() {
    let base = pipeline(&ScenarioConfig::defaults(Scenario::DoubleWell)).unwrap();
    let total = 20.0 * PI;
    let mut deficits = Vec::new();
    for r in [500, 1000, 2000, 4000] {
        let mut opts = base.options_for(8);
        opts.repetitions = r;
        opts.dt = total / r as f64;
        let program = bosonic_synth::compiler::compile_program(&base.hamiltonian, &opts).unwrap();
        let options = RunOptions {
            schedule: Some(Schedule::final_only(r)),
            ..RunOptions::default()
        };
        let (report, _) = run_program(&program, &base.initial, &options).unwrap();
        assert!((0.0..=1.0).contains(&report.success_probability));
        deficits.push(report.failure_probability);
    }
    // at least first order in Δt; in practice the deficit falls faster
    for w in deficits.windows(2) {
        assert!(w[1] < w[0] / 2.0, "{deficits:?}");
    }
}

#[test]
fn exact_trig_route_matches_dense_composite() {
    let (d, dt, r, omega) = (24, 0.1, 15, 1.0);
    let spec = PotentialSpec::polynomial(
        vec![Monomial::new(0.05, vec![4]), Monomial::new(0.2, vec![1])],
        vec![8.0],
    )
    .unwrap();
    let series = coefficients(&spec, 4).unwrap();
    let space = ModeSpace::oscillators(d, 1).unwrap();
    let psi = coherent_state(space, 0, Complex64::new(0.6, 0.1)).unwrap();
    let out = run_exact_trig_gates(&series, &[omega], dt, r, &psi).unwrap();

    let i = Complex64::new(0.0, 1.0);
    // truncated (X² + P²)/2: n + 1/2, except (d - 1)/2 on the top level
    let level = |n: usize| if n + 1 < d { n as f64 + 0.5 } else { (d - 1) as f64 / 2.0 };
    let free = bosonic_synth::hilbert::CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |n, _| {
        (-i * omega * dt * level(n)).exp()
    }));
    let phase = function_of_x(d, |x| (-i * dt * series.evaluate_dynamic(&[x])).exp());
    let step = phase * free;
    let mut v: CVector = psi.amplitudes().clone();
    for _ in 0..r {
        v = &step * v;
    }
    let expected = StateVector::normalize(space, v).unwrap();
    let inf = 1.0 - fidelity(&out, &expected).unwrap();
    assert!(inf < 1e-10, "{inf:e}");
}

#[test]
fn global_phase_does_not_change_fidelity() {
    let pipe = pipeline(
        &ScenarioConfig::from_toml(
            "scenario = \"double_well\"\n[run]\ntruncation_dim = 32\nrepetitions = 50\ntotal_time = 5.0\n",
        )
        .unwrap(),
    )
    .unwrap();
    let program = pipe.compile(4).unwrap();
    let reference = Arc::new(ExactPropagator::new(&pipe.hamiltonian, &pipe.initial.space()).unwrap());
    let options = RunOptions {
        schedule: Some(Schedule::evenly(50, 5)),
        reference: Some(reference),
        ..RunOptions::default()
    };
    let (a, _) = run_program(&program, &pipe.initial, &options).unwrap();
    let phased = StateVector::new(
        pipe.initial.space(),
        pipe.initial.amplitudes() * Complex64::from_polar(1.0, 1.234),
    )
    .unwrap();
    let (b, _) = run_program(&program, &phased, &options).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert!((x.fidelity.unwrap() - y.fidelity.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn report_quantities_stay_in_range() {
    let cfg = ScenarioConfig::from_toml(
        "scenario = \"two_mode\"\n[run]\ntruncation_dim = 12\nrepetitions = 40\norders = [3]\n[two_mode]\nalpha_grid = []\n",
    )
    .unwrap();
    let pipe = pipeline(&cfg).unwrap();
    let init = initial_state(
        pipe.initial.space(),
        &InitialState::Coherent {
            alpha: vec![[0.5, 0.1], [0.2, 0.0]],
        },
    )
    .unwrap();
    let program = pipe.compile(3).unwrap();
    let reference = Arc::new(pipe.reference().unwrap());
    let options = RunOptions {
        schedule: Some(Schedule::evenly(40, 9)),
        populations: vec![vec![1, 0], vec![0, 2]],
        reference: Some(reference),
        ..RunOptions::default()
    };
    let (report, _) = run_program(&program, &init, &options).unwrap();
    assert!(report.norm_drift < 1e-9);
    for rec in &report.records {
        assert!((0.0..=1.0).contains(&rec.success_probability));
        assert!((0.0..=1.0).contains(&rec.fidelity.unwrap()));
        assert!(rec.leakage >= 0.0);
        assert!(rec.populations.iter().all(|p| (0.0..=1.0 + 1e-12).contains(p)));
    }
}
