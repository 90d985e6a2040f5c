use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compiler::Splitting;
use crate::error::{Error, Result};
use crate::fourier::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    DoubleWell,
    TwoMode,
    Custom,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::DoubleWell => "double_well",
            Scenario::TwoMode => "two_mode",
            Scenario::Custom => "custom",
        }
    }
}

/// Initial oscillator state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Product of coherent states; `alpha[n] = [re, im]`.
    Coherent { alpha: Vec<[f64; 2]> },
    Fock { occupation: Vec<usize> },
}

impl InitialState {
    pub fn num_modes(&self) -> usize {
        match self {
            InitialState::Coherent { alpha } => alpha.len(),
            InitialState::Fock { occupation } => occupation.len(),
        }
    }

    /// `(⟨X_n⟩, σ_{X_n})` of each mode.
    pub fn position_moments(&self) -> Vec<(f64, f64)> {
        match self {
            InitialState::Coherent { alpha } => alpha.iter().map(|a| (SQRT_2 * a[0], 0.5f64.sqrt())).collect(),
            InitialState::Fock { occupation } => {
                occupation.iter().map(|&n| (0.0, (n as f64 + 0.5).sqrt())).collect()
            }
        }
    }

    pub(crate) fn alphas(&self) -> Option<Vec<Complex64>> {
        match self {
            InitialState::Coherent { alpha } => Some(alpha.iter().map(|a| Complex64::new(a[0], a[1])).collect()),
            InitialState::Fock { .. } => None,
        }
    }
}

/// Settings shared by every scenario. Unset fields take scenario defaults on resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Fourier orders `N_F` to run.
    pub orders: Option<Vec<usize>>,
    pub truncation_dim: Option<usize>,
    /// Any two of `repetitions`, `dt`, `total_time` (a third must agree).
    pub repetitions: Option<usize>,
    pub dt: Option<f64>,
    pub total_time: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub fuse: bool,
    #[serde(default)]
    pub splitting: Splitting,
    #[serde(default = "default_max_theta")]
    pub max_theta: f64,
    #[serde(default)]
    pub split_large_theta: bool,
    #[serde(default = "default_success_floor")]
    pub success_floor: f64,
    #[serde(default = "default_leakage_threshold")]
    pub leakage_threshold: f64,
    #[serde(default = "default_leakage_buffer")]
    pub leakage_buffer: usize,
    /// Turn leakage above threshold into an error instead of a flag.
    #[serde(default)]
    pub fail_on_leakage: bool,
    /// The pipeline has no randomness; `false` is rejected.
    #[serde(default = "default_true")]
    pub deterministic: bool,
}

fn default_samples() -> usize {
    crate::simulator::DEFAULT_SAMPLES
}
fn default_max_theta() -> f64 {
    crate::compiler::THETA_WARN
}
fn default_success_floor() -> f64 {
    crate::simulator::DEFAULT_SUCCESS_FLOOR
}
fn default_leakage_threshold() -> f64 {
    crate::simulator::DEFAULT_LEAKAGE_THRESHOLD
}
fn default_leakage_buffer() -> usize {
    crate::hilbert::DEFAULT_LEAKAGE_BUFFER
}
fn default_true() -> bool {
    true
}

impl Default for RunSection {
    fn default() -> Self {
        toml::from_str("").expect("all run fields have defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleWellParams {
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "default_xi1")]
    pub xi1_over_omega: f64,
    #[serde(default = "default_xi0")]
    pub xi0_over_omega: f64,
    /// Defaults to `7 X_0 / 2`.
    pub domain_length: Option<f64>,
    /// Real coherent amplitude; defaults to `-X_0/√2`.
    pub alpha: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn default_xi1() -> f64 {
    0.35
}
fn default_xi0() -> f64 {
    0.35 / 8.0
}

impl Default for DoubleWellParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

impl DoubleWellParams {
    /// Right-well minimum of `ξ_1 X⁴ - ξ_0 X²`.
    pub fn x0(&self) -> f64 {
        (self.xi0_over_omega / (2.0 * self.xi1_over_omega)).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeParams {
    #[serde(default = "one")]
    pub omega1: f64,
    /// Defaults to `ω_1 / 2`.
    pub omega2: Option<f64>,
    #[serde(default = "default_xi")]
    pub xi_over_omega1: f64,
    /// `ξ Δt`; fixes `Δt` unless `run.dt` is set.
    #[serde(default = "default_xi_dt")]
    pub xi_dt: f64,
    pub domain_lengths: Option<Vec<f64>>,
    pub initial: Option<InitialState>,
    pub populations: Option<Vec<Vec<usize>>>,
    /// `α_1` values for the coherent-state infidelity sweep; empty disables it.
    pub alpha_grid: Option<Vec<f64>>,
}

fn default_xi() -> f64 {
    0.05
}
fn default_xi_dt() -> f64 {
    1.715e-3
}

impl Default for TwoModeParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    pub frequencies: Vec<f64>,
    pub terms: Vec<Monomial>,
    /// Defaults to a box holding `|⟨X⟩| + 4σ` of the initial state.
    pub domain_lengths: Option<Vec<f64>>,
    pub angles: Option<Vec<f64>>,
    /// `X_n²` coefficient moved from the physical potential into `H_0` (bookkeeping only).
    pub absorbed_x2: Option<Vec<f64>>,
    pub initial: InitialState,
    #[serde(default)]
    pub populations: Vec<Vec<usize>>,
    /// Largest accepted RMS reconstruction error, relative to the potential's
    /// RMS value on the box.
    #[serde(default = "default_reconstruction_bound")]
    pub reconstruction_bound: f64,
    #[serde(default = "default_reconstruction_samples")]
    pub reconstruction_samples: usize,
}

fn default_reconstruction_bound() -> f64 {
    0.1
}
fn default_reconstruction_samples() -> usize {
    64
}

/// Lamb-Dicke model for `estimate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateParams {
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_native_order")]
    pub order: u32,
    /// Defaults to the largest number of modes one harmonic couples.
    pub modes_per_term: Option<u32>,
}

fn default_eta() -> f64 {
    0.01
}
fn default_native_order() -> u32 {
    4
}

impl Default for EstimateParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

/// A complete, validated description of one reproducible run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub run: RunSection,
    pub double_well: Option<DoubleWellParams>,
    pub two_mode: Option<TwoModeParams>,
    pub custom: Option<CustomParams>,
    pub estimate: Option<EstimateParams>,
}

impl ScenarioConfig {
    /// Defaults of a scenario with no overrides.
    pub fn defaults(scenario: Scenario) -> Self {
        Self {
            scenario,
            run: RunSection::default(),
            double_well: None,
            two_mode: None,
            custom: None,
            estimate: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file, or the config embedded in a `*_report.toml`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match text.parse::<toml::Table>() {
            Ok(t) if t.contains_key("config") && t.contains_key("summary") => super::config_from_report(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// SHA-256 of the resolved config's TOML form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Fills every default and checks the schema. Idempotent.
    pub fn resolve(&self) -> Result<Self> {
        let mut c = self.clone();
        if !c.run.deterministic {
            return Err(Error::Config("deterministic = false is not supported".into()));
        }
        match c.scenario {
            Scenario::DoubleWell => {
                if c.two_mode.is_some() || c.custom.is_some() {
                    return Err(Error::Config("double_well config has a foreign scenario section".into()));
                }
                let mut p = c.double_well.take().unwrap_or_default();
                check_finite("double_well", &[p.omega, p.xi0_over_omega, p.xi1_over_omega])?;
                if p.omega <= 0.0 || p.xi1_over_omega <= 0.0 || p.xi0_over_omega <= 0.0 {
                    return Err(Error::Config("omega and both xi ratios must be positive".into()));
                }
                let x0 = p.x0();
                p.domain_length.get_or_insert(3.5 * x0);
                p.alpha.get_or_insert(-x0 / SQRT_2);
                check_finite("double_well", &[p.domain_length.unwrap(), p.alpha.unwrap()])?;
                let omega = p.omega;
                c.run.orders.get_or_insert_with(|| vec![2, 4, 8]);
                c.run.truncation_dim.get_or_insert(64);
                resolve_time(&mut c.run, Some(500), None, Some(20.0 * PI / omega))?;
                c.double_well = Some(p);
            }
            Scenario::TwoMode => {
                if c.double_well.is_some() || c.custom.is_some() {
                    return Err(Error::Config("two_mode config has a foreign scenario section".into()));
                }
                let mut p = c.two_mode.take().unwrap_or_default();
                let omega2 = *p.omega2.get_or_insert(p.omega1 / 2.0);
                check_finite("two_mode", &[p.omega1, omega2, p.xi_over_omega1, p.xi_dt])?;
                if p.xi_over_omega1 == 0.0 && c.run.dt.is_none() {
                    return Err(Error::Config("xi = 0 needs an explicit run.dt".into()));
                }
                p.domain_lengths.get_or_insert_with(|| vec![2.0 * PI, 2.0 * PI]);
                p.initial.get_or_insert(InitialState::Fock { occupation: vec![1, 0] });
                p.populations.get_or_insert_with(|| vec![vec![1, 0], vec![0, 2]]);
                p.alpha_grid
                    .get_or_insert_with(|| (0..=6).map(|i| i as f64 / 5.0).collect());
                if p.domain_lengths.as_ref().unwrap().len() != 2 || p.initial.as_ref().unwrap().num_modes() != 2 {
                    return Err(Error::Config("two_mode needs two domain lengths and a two-mode initial state".into()));
                }
                let xi = p.xi_over_omega1 * p.omega1;
                c.run.orders.get_or_insert_with(|| vec![3, 8]);
                c.run.truncation_dim.get_or_insert(24);
                let dt = if c.run.dt.is_some() { None } else { Some(p.xi_dt / xi) };
                resolve_time(&mut c.run, Some(2500), dt, None)?;
                c.two_mode = Some(p);
            }
            Scenario::Custom => {
                if c.double_well.is_some() || c.two_mode.is_some() {
                    return Err(Error::Config("custom config has a foreign scenario section".into()));
                }
                let mut p = c
                    .custom
                    .take()
                    .ok_or_else(|| Error::Config("custom scenario needs a [custom] section".into()))?;
                let n = p.frequencies.len();
                if n == 0 {
                    return Err(Error::Config("custom.frequencies must list at least one mode".into()));
                }
                check_finite("custom.frequencies", &p.frequencies)?;
                for t in &p.terms {
                    if t.exponents.len() != n || !t.coefficient.is_finite() {
                        return Err(Error::Config(format!("bad monomial {t:?} for {n} mode(s)")));
                    }
                }
                if p.initial.num_modes() != n {
                    return Err(Error::Config("custom.initial has the wrong number of modes".into()));
                }
                if p.domain_lengths.is_none() {
                    p.domain_lengths = Some(
                        p.initial
                            .position_moments()
                            .iter()
                            .map(|&(mean, sigma)| crate::fourier::default_domain_length(mean, sigma))
                            .collect(),
                    );
                }
                p.angles.get_or_insert_with(|| vec![0.0; n]);
                p.absorbed_x2.get_or_insert_with(|| vec![0.0; n]);
                for (name, v) in [
                    ("domain_lengths", p.domain_lengths.as_ref().unwrap()),
                    ("angles", p.angles.as_ref().unwrap()),
                    ("absorbed_x2", p.absorbed_x2.as_ref().unwrap()),
                ] {
                    if v.len() != n {
                        return Err(Error::Config(format!("custom.{name} needs {n} entries")));
                    }
                    check_finite(name, v)?;
                }
                if !(p.reconstruction_bound >= 0.0) || p.reconstruction_samples == 0 {
                    return Err(Error::Config("reconstruction bound/samples out of range".into()));
                }
                c.run.orders.get_or_insert_with(|| vec![8]);
                c.run.truncation_dim.get_or_insert(if n == 1 { 64 } else { 24 });
                resolve_time(&mut c.run, None, None, None)?;
                c.custom = Some(p);
            }
        }
        if let Some(e) = &c.estimate {
            if !(e.eta > 0.0 && e.eta < 1.0) || e.order < 2 {
                return Err(Error::Config("estimate needs 0 < eta < 1 and order >= 2".into()));
            }
        }
        let run = &c.run;
        if run.orders.as_ref().unwrap().is_empty() {
            return Err(Error::Config("run.orders is empty".into()));
        }
        if run.truncation_dim.unwrap() < 2 || run.samples == 0 {
            return Err(Error::Config("truncation_dim must be >= 2 and samples >= 1".into()));
        }
        check_finite("run", &[run.max_theta, run.success_floor, run.leakage_threshold])?;
        if run.max_theta <= 0.0 || !(0.0..=1.0).contains(&run.success_floor) || run.leakage_threshold < 0.0 {
            return Err(Error::Config("max_theta, success_floor or leakage_threshold out of range".into()));
        }
        Ok(c)
    }

    pub fn orders(&self) -> &[usize] {
        self.run.orders.as_deref().unwrap_or(&[])
    }
}

fn check_finite(section: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Config(format!("{section}: non-finite value {v}"))),
        None => Ok(()),
    }
}

/// Completes `(repetitions, dt, total_time)` from whichever two are known,
/// filling scenario defaults for what the user left out.
fn resolve_time(
    run: &mut RunSection,
    default_r: Option<usize>,
    default_dt: Option<f64>,
    default_t: Option<f64>,
) -> Result<()> {
    let given = [run.repetitions.is_some(), run.dt.is_some(), run.total_time.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given < 2 {
        // Fill from defaults in priority order: repetitions, dt, total time.
        if run.repetitions.is_none() && (run.dt.is_none() || run.total_time.is_none()) {
            run.repetitions = default_r;
        }
        let given = [run.repetitions.is_some(), run.dt.is_some(), run.total_time.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given < 2 && run.dt.is_none() {
            run.dt = default_dt;
        }
        let given = [run.repetitions.is_some(), run.dt.is_some(), run.total_time.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given < 2 && run.total_time.is_none() {
            run.total_time = default_t;
        }
    }
    match (run.repetitions, run.dt, run.total_time) {
        (Some(r), Some(dt), Some(t)) => {
            if ((r as f64) * dt - t).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(Error::Config(format!("repetitions * dt = {} disagrees with total_time = {t}", r as f64 * dt)));
            }
        }
        (Some(r), Some(dt), None) => run.total_time = Some(r as f64 * dt),
        (Some(r), None, Some(t)) => run.dt = Some(t / r as f64),
        (None, Some(dt), Some(t)) => {
            let r = (t / dt).round();
            if !(r >= 1.0) {
                return Err(Error::Config("total_time / dt must be at least 1".into()));
            }
            run.repetitions = Some(r as usize);
            run.total_time = Some(r * dt);
        }
        _ => {
            return Err(Error::Config(
                "give two of run.repetitions, run.dt and run.total_time".into(),
            ))
        }
    }
    let (r, dt, t) = (run.repetitions.unwrap(), run.dt.unwrap(), run.total_time.unwrap());
    if r == 0 || !(dt > 0.0 && dt.is_finite()) || !t.is_finite() {
        return Err(Error::Config("repetitions must be >= 1 and dt positive".into()));
    }
    // keep r · dt and total_time bit-consistent on re-resolution
    run.total_time = Some(r as f64 * dt);
    Ok(())
}
