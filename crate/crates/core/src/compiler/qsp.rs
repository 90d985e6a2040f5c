use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::ir::GateInstruction;

/// Which harmonic a trigonometric gate realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Cosine,
    Sine,
}

/// Parameters of `exp(-i Λ cos(μ·Q))` or `exp(-i Λ sin(μ·Q))`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigGateParams {
    pub mu: Vec<f64>,
    pub lambda: f64,
    pub kind: TrigKind,
    /// Quadrature angle `θ_n` of each mode.
    pub angles: Vec<f64>,
}

impl TrigGateParams {
    pub fn new(mu: Vec<f64>, lambda: f64, kind: TrigKind, angles: Vec<f64>) -> Self {
        Self {
            mu,
            lambda,
            kind,
            angles,
        }
    }

    /// `ϑ = -Λ/2`.
    pub fn theta(&self) -> f64 {
        -self.lambda / 2.0
    }

    /// `κ = μ/2`.
    pub fn kappa(&self) -> Vec<f64> {
        self.mu.iter().map(|m| m / 2.0).collect()
    }
}

/// The two-displacement sequence for `W_x(κ) exp(iϑσ_z) W_x(κ)^dag`.
///
/// Rotation angles are `π/2`, `ϑ - π/2`, `0` in time order, interleaved with
/// two `W_x(κ)`; zero-angle rotations are left out.
pub fn compile_qsp_block(theta: f64, kappa: &[f64], angles: &[f64]) -> Vec<GateInstruction> {
    let cd = GateInstruction::ConditionalDisplacement {
        kappa: kappa.to_vec(),
        angles: angles.to_vec(),
    };
    let mut out = Vec::with_capacity(4);
    out.push(GateInstruction::RotationZ { angle: FRAC_PI_2 });
    out.push(cd.clone());
    let phi1 = theta - FRAC_PI_2;
    if phi1 != 0.0 {
        out.push(GateInstruction::RotationZ { angle: phi1 });
    }
    out.push(cd);
    out
}

/// Lie-Trotter trigonometric gate.
///
/// Cosine: `𝒰(ϑ,κ) 𝒰(ϑ,-κ)`. Sine: `H 𝒰(ϑ,κ) 𝒰(-ϑ,-κ) H`. Operator products
/// are emitted right factor first.
pub fn compile_trig_gate(params: &TrigGateParams) -> Vec<GateInstruction> {
    let theta = params.theta();
    let kappa = params.kappa();
    let neg: Vec<f64> = kappa.iter().map(|k| -k).collect();
    let mut out = Vec::with_capacity(10);
    match params.kind {
        TrigKind::Cosine => {
            out.extend(compile_qsp_block(theta, &neg, &params.angles));
            out.extend(compile_qsp_block(theta, &kappa, &params.angles));
        }
        TrigKind::Sine => {
            out.push(GateInstruction::HadamardYZ);
            out.extend(compile_qsp_block(-theta, &neg, &params.angles));
            out.extend(compile_qsp_block(theta, &kappa, &params.angles));
            out.push(GateInstruction::HadamardYZ);
        }
    }
    out
}
