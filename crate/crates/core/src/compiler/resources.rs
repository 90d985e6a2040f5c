use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::ir::Splitting;
use super::qsp::TrigKind;
use super::trotter::{trig_gate_params, CompileOptions};
use crate::error::{Error, Result};
use crate::fourier::coefficients;
use crate::simulator::HamiltonianSpec;

/// Native-interaction model used for the speedup comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NativeModel {
    /// Lamb-Dicke parameter `η`.
    pub eta: f64,
    /// Order `d` of the native nonlinear interaction.
    pub order: u32,
    /// Number of modes `M` coupled by a single harmonic.
    pub modes_per_term: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub cosine_terms: usize,
    pub sine_terms: usize,
    pub conditional_displacements: usize,
    pub rotations: usize,
    pub hadamards: usize,
    pub free_evolutions: usize,
    pub postselect_markers: usize,
    pub total_instructions: usize,
    /// `4 N_F^M / η`.
    pub qsp_time_proxy: f64,
    /// `1 / η^d`.
    pub native_time_proxy: f64,
    /// `η^{-(d-1)/M}`: the largest `N_F` for which the speedup holds.
    pub speedup_threshold: f64,
    /// `N_F^M < η^{-(d-1)}`.
    pub speedup: bool,
}

impl NativeModel {
    pub fn validate(&self, num_modes: usize) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1), got {}", self.eta)));
        }
        if self.order < 2 {
            return Err(Error::InvalidParameter(format!("native order d must be >= 2, got {}", self.order)));
        }
        if self.modes_per_term < 1 || self.modes_per_term as usize > num_modes {
            return Err(Error::InvalidParameter(format!(
                "modes per term M = {} must lie in 1..={num_modes}",
                self.modes_per_term
            )));
        }
        Ok(())
    }

    pub fn speedup_threshold(&self) -> f64 {
        (1.0 / self.eta).powf((self.order - 1) as f64 / self.modes_per_term as f64)
    }

    pub fn speedup(&self, max_order: usize) -> bool {
        (max_order as f64).powi(self.modes_per_term as i32) < (1.0 / self.eta).powi((self.order - 1) as i32)
    }
}

/// Closed-form gate counts for the unfused program `compile_program` would emit.
pub fn resource_estimate(
    ham: &HamiltonianSpec,
    options: &CompileOptions,
    native: &NativeModel,
) -> Result<ResourceReport> {
    native.validate(ham.num_modes())?;
    if options.repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
    }
    let series = coefficients(ham.potential(), options.max_order)?;
    let gates = trig_gate_params(&series, options.dt, &options.guard);
    let r = options.repetitions;
    let mut rotations = 0;
    let mut hadamards = 0;
    for g in &gates {
        // Each 𝒰(ϑ, ·) carries R_z(π/2) and R_z(ϑ - π/2); the latter vanishes only at ϑ = π/2.
        let middle = |theta: f64| usize::from(theta - FRAC_PI_2 != 0.0);
        let theta = g.theta();
        rotations += match g.kind {
            TrigKind::Cosine => 2 + 2 * middle(theta),
            TrigKind::Sine => 2 + middle(-theta) + middle(theta),
        };
        if g.kind == TrigKind::Sine {
            hadamards += 2;
        }
    }
    let per_step_free = match options.splitting {
        Splitting::LieTrotter => 1,
        Splitting::Strang => 2,
    };
    let cds = r * gates.len() * 4;
    let rotations = r * rotations;
    let hadamards = r * hadamards;
    let free_evolutions = r * per_step_free;
    let postselect_markers = usize::from(options.postselect);
    let m = native.modes_per_term as i32;
    let nf = options.max_order as f64;
    Ok(ResourceReport {
        cosine_terms: series.cosine_count(),
        sine_terms: series.sine_count(),
        conditional_displacements: cds,
        rotations,
        hadamards,
        free_evolutions,
        postselect_markers,
        total_instructions: cds + rotations + hadamards + free_evolutions + postselect_markers,
        qsp_time_proxy: 4.0 * nf.powi(m) / native.eta,
        native_time_proxy: native.eta.powi(-(native.order as i32)),
        speedup_threshold: native.speedup_threshold(),
        speedup: native.speedup(options.max_order),
    })
}
