use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use crate::compiler::{GateInstruction, GateProgram};
use crate::error::Result;
use crate::text::fmt_f64;

/// Observables at one recorded step, measured on the `|↑⟩`-projected state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// `⟨X_n⟩` per mode.
    pub position: Vec<f64>,
    pub populations: Vec<f64>,
    /// `|↑⟩` weight before projection.
    pub success_probability: f64,
    /// `|↓⟩` weight, computed directly rather than as `1 - p`.
    pub failure_probability: f64,
    pub leakage: f64,
    pub fidelity: Option<f64>,
    pub exact_position: Option<Vec<f64>>,
    pub exact_populations: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub conditional_displacements: usize,
    pub rotations: usize,
    pub hadamards: usize,
    pub free_evolutions: usize,
    pub postselect_markers: usize,
    pub total: usize,
}

impl GateCounts {
    pub fn of(program: &GateProgram) -> Self {
        let c = |f: fn(&GateInstruction) -> bool| program.count(f);
        Self {
            conditional_displacements: c(|i| matches!(i, GateInstruction::ConditionalDisplacement { .. })),
            rotations: c(|i| matches!(i, GateInstruction::RotationZ { .. })),
            hadamards: c(|i| matches!(i, GateInstruction::HadamardYZ)),
            free_evolutions: c(|i| matches!(i, GateInstruction::FreeEvolution { .. })),
            postselect_markers: c(|i| matches!(i, GateInstruction::PostSelectUp)),
            total: program.instruction_count(),
        }
    }
}

/// Result of one simulated program.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    #[serde(skip)]
    pub records: Vec<StepRecord>,
    pub repetitions: usize,
    pub total_time: f64,
    pub success_probability: f64,
    pub failure_probability: f64,
    pub final_fidelity: Option<f64>,
    pub final_leakage: f64,
    pub max_leakage: f64,
    pub leakage_threshold: f64,
    /// Leakage stayed below threshold for every record.
    pub trusted: bool,
    /// Largest `| ‖ψ‖ - 1 |` before postselection.
    pub norm_drift: f64,
    pub gate_counts: GateCounts,
    pub hadamard_normalization: String,
    pub program_digest: String,
    #[serde(skip)]
    pub position_labels: Vec<String>,
    #[serde(skip)]
    pub population_labels: Vec<String>,
    /// Not serialized, so that output files depend only on their inputs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    pub fn final_infidelity(&self) -> Option<f64> {
        self.final_fidelity.map(|f| 1.0 - f)
    }

    /// Time series as CSV.
    ///
    /// Each entry of `comments` becomes a `# ` line above the header. Columns:
    /// `step, time, x_n…, pop_…, success_prob, leakage`, followed by
    /// `fidelity, infidelity, exact_x_n…, exact_pop_…, leakage_flag` when a
    /// reference was attached.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let with_ref = self.records.iter().any(|r| r.fidelity.is_some());
        let mut header: Vec<String> = vec!["step".into(), "time".into()];
        header.extend(self.position_labels.iter().cloned());
        header.extend(self.population_labels.iter().cloned());
        header.push("success_prob".into());
        header.push("leakage".into());
        if with_ref {
            header.push("fidelity".into());
            header.push("infidelity".into());
            header.extend(self.position_labels.iter().map(|l| format!("exact_{l}")));
            header.extend(self.population_labels.iter().map(|l| format!("exact_{l}")));
            header.push("leakage_flag".into());
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.step.to_string(), fmt_f64(r.time)];
            row.extend(r.position.iter().map(|x| fmt_f64(*x)));
            row.extend(r.populations.iter().map(|x| fmt_f64(*x)));
            row.push(fmt_f64(r.success_probability));
            row.push(fmt_f64(r.leakage));
            if with_ref {
                let f = r.fidelity.unwrap_or(f64::NAN);
                row.push(fmt_f64(f));
                row.push(fmt_f64(1.0 - f));
                for v in r.exact_position.iter().flatten() {
                    row.push(fmt_f64(*v));
                }
                for v in r.exact_populations.iter().flatten() {
                    row.push(fmt_f64(*v));
                }
                row.push(u8::from(r.leakage > self.leakage_threshold).to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
