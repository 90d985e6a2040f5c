use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bosonic-synth"));
    c.env("RUST_LOG", "error");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SHORT_DW: &str = "scenario = \"double_well\"\n[run]\nrepetitions = 20\ntotal_time = 2.0\nsamples = 5\n";

#[test]
fn double_well_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dw.toml", SHORT_DW);
    let out = dir.path().join("out");
    let status = bin()
        .args(["double-well", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--nf", "2,4", "--trunc", "24", "--fuse"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in [
        "double_well_nf2.csv",
        "double_well_nf4.csv",
        "double_well_nf4.ir",
        "double_well_exact.csv",
        "double_well_infidelity.csv",
        "double_well_report.toml",
    ] {
        assert!(out.join(name).exists(), "{name}");
    }
    let ir = std::fs::read_to_string(out.join("double_well_nf4.ir")).unwrap();
    assert!(ir.contains("fused = true"));
    let csv = std::fs::read_to_string(out.join("double_well_nf2.csv")).unwrap();
    assert!(csv.starts_with("# scenario = double_well\n# config_digest = "));
}

#[test]
fn rerun_from_report_reproduces_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dw.toml", SHORT_DW);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let run = |cfg: &Path, out: &Path| {
        bin()
            .args(["double-well", "--nf", "2", "--trunc", "24", "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap()
    };
    assert!(run(&cfg, &a).success());
    assert!(run(&a.join("double_well_report.toml"), &b).success());
    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "scenario = \"double_well\"\n[run]\nunknown_key = 3\n");
    let s = bin().args(["double-well", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(s.code(), Some(2));
    let s = bin().arg("custom").arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(s.code(), Some(2));
    let wrong = write_config(dir.path(), "tm.toml", "scenario = \"two_mode\"\n");
    let s = bin().args(["double-well", "--config"]).arg(&wrong).status().unwrap();
    assert_eq!(s.code(), Some(2));
}

#[test]
fn reconstruction_gate_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        r#"
scenario = "custom"
[run]
orders = [2]
repetitions = 10
dt = 0.1
truncation_dim = 32
[custom]
frequencies = [1.0]
domain_lengths = [12.0]
terms = [{ coefficient = 0.05, exponents = [4] }, { coefficient = 0.2, exponents = [1] }]
initial = { kind = "fock", occupation = [0] }
"#,
    );
    let out = bin()
        .args(["custom", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("raise N_F"));
}

#[test]
fn leakage_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "leak.toml",
        "scenario = \"double_well\"\n[run]\nrepetitions = 20\ntotal_time = 2.0\nsamples = 5\nfail_on_leakage = true\nleakage_threshold = 0.0\n",
    );
    let s = bin()
        .args(["double-well", "--nf", "2", "--trunc", "16", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(3));
}

#[test]
fn estimate_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e");
    assert!(bin().args(["estimate", "--nf", "8", "--out"]).arg(&out).status().unwrap().success());
    let text = std::fs::read_to_string(out.join("double_well_estimate.toml")).unwrap();
    assert!(text.contains("speedup = true"));
    assert!(bin()
        .args(["decompose", "--scenario", "two-mode", "--nf", "3", "--out"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let table = std::fs::read_to_string(out.join("two_mode_nf3_fourier.txt")).unwrap();
    assert!(table.contains("modes = 2"));
    assert!(out.join("two_mode_nf3.ir").exists());
}
