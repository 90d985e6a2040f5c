//! `bosonic-synth`: runs scenarios from TOML configs and writes CSV, IR and
//! TOML reports.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a numerical trust
//! check (leakage or postselection floor) fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bosonic_synth::experiments::{
    decompose, estimate, run_custom, run_double_well, run_two_mode, Scenario, ScenarioConfig,
    ScenarioOutput,
};
use bosonic_synth::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bosonic-synth", version, about = "Fourier synthesis of bosonic Hamiltonians into qubit-oscillator gate programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quartic double well started in the left well.
    DoubleWell(Common),
    /// Two modes coupled by xi X1 X2^2, with the coherent-state sweep.
    TwoMode(Common),
    /// User-supplied polynomial potential (needs --config).
    Custom(Common),
    /// Closed-form gate counts and the native-interaction comparison.
    Estimate(Scenarioed),
    /// Fourier coefficient tables and gate programs, without simulating.
    Decompose(Scenarioed),
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML) or a `*_report.toml` from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Fourier orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    nf: Option<Vec<usize>>,
    /// Fock truncation per mode.
    #[arg(long)]
    trunc: Option<usize>,
    /// Merge adjacent conditional displacements before running.
    #[arg(long)]
    fuse: bool,
}

#[derive(Args)]
struct Scenarioed {
    /// Built-in scenario used when no config is given.
    #[arg(long, value_parser = ["double-well", "two-mode"], default_value = "double-well")]
    scenario: String,
    #[command(flatten)]
    common: Common,
}

fn config(common: &Common, default: Option<Scenario>) -> Result<ScenarioConfig, Error> {
    let mut cfg = match (&common.config, default) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(s)) => ScenarioConfig::defaults(s),
        (None, None) => return Err(Error::Config("this subcommand needs --config".into())),
    };
    if let Some(s) = default {
        if common.config.is_some() && cfg.scenario != s {
            return Err(Error::Config(format!(
                "config is for {}, not {}",
                cfg.scenario.as_str(),
                s.as_str()
            )));
        }
    }
    if let Some(nf) = &common.nf {
        cfg.run.orders = Some(nf.clone());
    }
    if let Some(t) = common.trunc {
        cfg.run.truncation_dim = Some(t);
    }
    if common.fuse {
        cfg.run.fuse = true;
    }
    Ok(cfg)
}

fn write(out: &ScenarioOutput, dir: &Path) -> Result<(), Error> {
    out.write_to(dir)?;
    for name in out.files.keys() {
        println!("{}", dir.join(name).display());
    }
    Ok(())
}

fn summarize(out: &ScenarioOutput) {
    for run in &out.runs {
        let r = &run.report;
        let inf = r.final_infidelity().map_or("n/a".to_string(), |v| format!("{v:.6e}"));
        log::info!(
            "N_F = {}: infidelity {inf}, success {:.12}, max leakage {:.3e}{}",
            run.max_order,
            r.success_probability,
            r.max_leakage,
            if r.trusted { "" } else { " (flagged)" }
        );
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::DoubleWell(c) => {
            let out = run_double_well(&config(&c, Some(Scenario::DoubleWell))?)?;
            summarize(&out);
            write(&out, &c.out)
        }
        Command::TwoMode(c) => {
            let out = run_two_mode(&config(&c, Some(Scenario::TwoMode))?)?;
            summarize(&out);
            write(&out, &c.out)
        }
        Command::Custom(c) => {
            let cfg = config(&c, None)?;
            let out = run_custom(&cfg)?;
            summarize(&out);
            write(&out, &c.out)
        }
        Command::Estimate(s) => {
            let cfg = scenarioed(&s)?;
            let (out, reports) = estimate(&cfg)?;
            for (nf, r) in &reports {
                log::info!(
                    "N_F = {nf}: {} conditional displacements, speedup {} (threshold {:.3e})",
                    r.conditional_displacements,
                    r.speedup,
                    r.speedup_threshold
                );
            }
            write(&out, &s.common.out)
        }
        Command::Decompose(s) => {
            let out = decompose(&scenarioed(&s)?)?;
            write(&out, &s.common.out)
        }
    }
}

fn scenarioed(s: &Scenarioed) -> Result<ScenarioConfig, Error> {
    if s.common.config.is_some() {
        return config(&s.common, None);
    }
    let scenario = match s.scenario.as_str() {
        "two-mode" => Scenario::TwoMode,
        _ => Scenario::DoubleWell,
    };
    config(&s.common, Some(scenario))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical_trust() { 3 } else { 2 })
        }
    }
}
