use bosonic_synth::experiments::{
    config_from_report, pipeline, run_custom, run_double_well, run_scenario, run_two_mode, CustomParams,
    InitialState, Scenario, ScenarioConfig,
};
use bosonic_synth::fourier::Monomial;
use bosonic_synth::Error;

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

fn custom_double_well() -> ScenarioConfig {
    let dw = ScenarioConfig::defaults(Scenario::DoubleWell).resolve().unwrap();
    let p = dw.double_well.clone().unwrap();
    let mut c = ScenarioConfig::defaults(Scenario::Custom);
    c.run = dw.run.clone();
    c.custom = Some(CustomParams {
        frequencies: vec![p.omega],
        terms: vec![
            Monomial::new(p.xi1_over_omega * p.omega, vec![4]),
            Monomial::new(-(p.xi0_over_omega * p.omega + p.omega / 2.0), vec![2]),
        ],
        domain_lengths: p.domain_length.map(|l| vec![l]),
        angles: None,
        absorbed_x2: Some(vec![p.omega / 2.0]),
        initial: InitialState::Coherent {
            alpha: vec![[p.alpha.unwrap(), 0.0]],
        },
        populations: Vec::new(),
        reconstruction_bound: f64::INFINITY,
        reconstruction_samples: 64,
    });
    c
}

#[test]
fn custom_copy_of_double_well_reproduces_its_data() {
    let dw = run_double_well(&ScenarioConfig::defaults(Scenario::DoubleWell)).unwrap();
    let custom = run_custom(&custom_double_well()).unwrap();
    for suffix in ["nf2.csv", "nf4.csv", "nf8.csv", "exact.csv", "infidelity.csv"] {
        let a = &dw.files[&format!("double_well_{suffix}")];
        let b = &custom.files[&format!("custom_{suffix}")];
        assert_eq!(data_rows(a), data_rows(b), "{suffix}");
    }
    for nf in [2, 4, 8] {
        assert_eq!(dw.run(nf).unwrap().program.step(), custom.run(nf).unwrap().program.step());
    }
}

#[test]
fn double_well_starts_in_left_well_and_tunnels() {
    let out = run_double_well(&ScenarioConfig::defaults(Scenario::DoubleWell)).unwrap();
    let x0 = out.config.double_well.as_ref().unwrap().x0();
    let rec = &out.run(8).unwrap().report.records;
    assert!((rec[0].position[0] + x0).abs() < 1e-12);
    assert!(rec.iter().any(|r| r.exact_position.as_ref().unwrap()[0] > 0.0));
    let report = &out.files["double_well_report.toml"];
    assert!(report.contains("exact_crossing_time"));
}

#[test]
fn zero_potential_is_exactly_harmonic() {
    let text = r#"
scenario = "custom"
[run]
orders = [4]
repetitions = 100
total_time = 6.0
truncation_dim = 30
samples = 11
[custom]
frequencies = [1.0]
terms = []
domain_lengths = [6.0]
initial = { kind = "coherent", alpha = [[0.8, -0.3]] }
"#;
    let out = run_custom(&ScenarioConfig::from_toml(text).unwrap()).unwrap();
    let run = out.run(4).unwrap();
    assert_eq!(run.program.step().len(), 1);
    assert!(run.report.final_infidelity().unwrap() <= 1e-9);
}

#[test]
fn asymmetric_well_has_both_harmonic_kinds() {
    let text = r#"
scenario = "custom"
[run]
orders = [8]
repetitions = 20
dt = 0.01
truncation_dim = 40
samples = 3
[custom]
frequencies = [1.0]
domain_lengths = [12.0]
terms = [
  { coefficient = 0.05, exponents = [4] },
  { coefficient = -0.7, exponents = [2] },
  { coefficient = 0.2, exponents = [1] },
]
initial = { kind = "fock", occupation = [0] }
"#;
    let out = run_custom(&ScenarioConfig::from_toml(text).unwrap()).unwrap();
    let report = &out.files["custom_report.toml"];
    let table: toml::Table = report.parse().unwrap();
    let order = &table["orders"].as_array().unwrap()[0];
    assert!(order["cosine_terms"].as_integer().unwrap() > 0);
    assert!(order["sine_terms"].as_integer().unwrap() > 0);
}

#[test]
fn coarse_series_is_refused() {
    let text = r#"
scenario = "custom"
[run]
orders = [2]
repetitions = 10
dt = 0.1
truncation_dim = 24
[custom]
frequencies = [1.0]
domain_lengths = [12.0]
terms = [{ coefficient = 0.05, exponents = [4] }, { coefficient = 0.2, exponents = [1] }]
initial = { kind = "fock", occupation = [0] }
"#;
    match run_custom(&ScenarioConfig::from_toml(text).unwrap()) {
        Err(Error::Reconstruction { error, bound }) => assert!(error > bound),
        other => panic!("expected a reconstruction error, got {other:?}"),
    }
}

const SHORT_TWO_MODE: &str = r#"
scenario = "two_mode"
[run]
orders = [3]
truncation_dim = 12
repetitions = 60
samples = 7
[two_mode]
alpha_grid = [0.0, 0.4]
"#;

#[test]
fn two_mode_outputs_are_deterministic_and_round_trip() {
    let cfg = ScenarioConfig::from_toml(SHORT_TWO_MODE).unwrap();
    let a = run_two_mode(&cfg).unwrap();
    assert_eq!(run_two_mode(&cfg).unwrap().files, a.files);
    let embedded = config_from_report(&a.files["two_mode_report.toml"]).unwrap();
    assert_eq!(run_scenario(&embedded).unwrap().files, a.files);
    let sweep = data_rows(&a.files["two_mode_alpha_sweep.csv"]);
    assert_eq!(sweep[0], "alpha_1,max_order,infidelity,leakage,leakage_flag");
    assert_eq!(sweep.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    a.write_to(dir.path()).unwrap();
    for name in a.files.keys() {
        assert_eq!(&std::fs::read_to_string(dir.path().join(name)).unwrap(), &a.files[name]);
    }
}

#[test]
fn infidelity_rows_carry_leakage_flags() {
    let mut cfg = ScenarioConfig::from_toml(SHORT_TWO_MODE).unwrap();
    cfg.run.leakage_threshold = 1e-30;
    let out = run_two_mode(&cfg).unwrap();
    let rows = data_rows(&out.files["two_mode_infidelity.csv"]);
    assert_eq!(rows[0], "max_order,step,time,infidelity,leakage,leakage_flag");
    for row in &rows[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        let leakage: f64 = cells[4].parse().unwrap();
        assert_eq!(cells[5], if leakage > 1e-30 { "1" } else { "0" });
    }
}

#[test]
fn two_mode_stays_in_two_level_manifold() {
    let pipe = pipeline(&ScenarioConfig::defaults(Scenario::TwoMode)).unwrap();
    let prop = pipe.reference().unwrap();
    let space = pipe.initial.space();
    let (i10, i02) = (space.occupation_index(&[1, 0]).unwrap(), space.occupation_index(&[0, 2]).unwrap());
    let coords = prop.project(&pipe.initial).unwrap();
    let total = pipe.compile.dt * pipe.compile.repetitions as f64;
    let mut best = 0.0f64;
    for k in 0..=200 {
        let s = prop.evolve_projected(&coords, total * k as f64 / 200.0);
        let (p10, p02) = (s[i10].norm_sqr(), s[i02].norm_sqr());
        assert!(p10 + p02 > 0.95, "step {k}: {}", p10 + p02);
        best = best.max(p02);
    }
    assert!(best > 0.5);
}

#[test]
fn two_mode_sweep_degrades_away_from_origin() {
    let out = run_two_mode(&ScenarioConfig::defaults(Scenario::TwoMode)).unwrap();
    let rows = data_rows(&out.files["two_mode_alpha_sweep.csv"]);
    for nf in ["3", "8"] {
        let inf: Vec<f64> = rows[1..]
            .iter()
            .map(|r| r.split(',').collect::<Vec<_>>())
            .filter(|c| c[1] == nf)
            .map(|c| c[2].parse().unwrap())
            .collect();
        assert_eq!(inf.len(), 7);
        assert!(inf.windows(2).all(|w| w[1] > w[0]), "N_F = {nf}: {inf:?}");
    }
}
