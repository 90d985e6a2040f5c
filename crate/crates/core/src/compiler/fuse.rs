use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::ir::{GateInstruction, GateProgram};

/// Rotations within this of a multiple of `2π` (or of `π/2` mod `π`) are treated as exact.
const ANGLE_TOL: f64 = 1e-14;

fn is_identity_angle(angle: f64) -> bool {
    let r = angle.rem_euclid(TAU);
    r < ANGLE_TOL || TAU - r < ANGLE_TOL
}

/// `exp(±iπ/2 σ_z) = ±iσ_z`, which anticommutes with `σ_x`.
fn is_quarter_turn(angle: f64) -> bool {
    (angle.rem_euclid(PI) - FRAC_PI_2).abs() < ANGLE_TOL
}

fn same_angles(a: &GateInstruction, b: &GateInstruction) -> bool {
    match (a, b) {
        (
            GateInstruction::ConditionalDisplacement { angles: x, .. },
            GateInstruction::ConditionalDisplacement { angles: y, .. },
        ) => x == y,
        _ => false,
    }
}

/// One left-to-right sweep; returns whether anything changed.
fn sweep(input: Vec<GateInstruction>) -> (Vec<GateInstruction>, bool) {
    let mut out: Vec<GateInstruction> = Vec::with_capacity(input.len());
    let mut changed = false;
    for inst in input {
        match inst {
            GateInstruction::RotationZ { angle } if is_identity_angle(angle) => changed = true,
            GateInstruction::ConditionalDisplacement { ref kappa, .. }
                if kappa.iter().all(|&k| k == 0.0) =>
            {
                changed = true
            }
            GateInstruction::RotationZ { angle } => match out.last_mut() {
                Some(GateInstruction::RotationZ { angle: prev }) => {
                    *prev += angle;
                    changed = true;
                    if is_identity_angle(*prev) {
                        out.pop();
                    }
                }
                _ => out.push(inst),
            },
            GateInstruction::HadamardYZ => {
                if matches!(out.last(), Some(GateInstruction::HadamardYZ)) {
                    out.pop();
                    changed = true;
                } else {
                    out.push(inst);
                }
            }
            GateInstruction::ConditionalDisplacement { .. } => {
                let n = out.len();
                // CD(a) Rz(±π/2) CD(b) -> CD(a - b) Rz(±π/2), using Rz W(b) = W(-b) Rz in time order.
                let commute = n >= 2
                    && matches!(out[n - 1], GateInstruction::RotationZ { angle } if is_quarter_turn(angle))
                    && same_angles(&out[n - 2], &inst);
                if commute {
                    let rz = out.pop().unwrap();
                    if let (
                        Some(GateInstruction::ConditionalDisplacement { kappa: prev, .. }),
                        GateInstruction::ConditionalDisplacement { kappa, .. },
                    ) = (out.last_mut(), &inst)
                    {
                        for (p, k) in prev.iter_mut().zip(kappa) {
                            *p -= k;
                        }
                    }
                    drop_zero_displacement(&mut out);
                    push_rotation(&mut out, rz);
                    changed = true;
                } else if n >= 1 && same_angles(&out[n - 1], &inst) {
                    if let (
                        Some(GateInstruction::ConditionalDisplacement { kappa: prev, .. }),
                        GateInstruction::ConditionalDisplacement { kappa, .. },
                    ) = (out.last_mut(), &inst)
                    {
                        for (p, k) in prev.iter_mut().zip(kappa) {
                            *p += k;
                        }
                    }
                    drop_zero_displacement(&mut out);
                    changed = true;
                } else {
                    out.push(inst);
                }
            }
            other => out.push(other),
        }
    }
    (out, changed)
}

fn drop_zero_displacement(out: &mut Vec<GateInstruction>) {
    if matches!(out.last(), Some(GateInstruction::ConditionalDisplacement { kappa, .. }) if kappa.iter().all(|&k| k == 0.0))
    {
        out.pop();
    }
}

fn push_rotation(out: &mut Vec<GateInstruction>, rz: GateInstruction) {
    if let (Some(GateInstruction::RotationZ { angle: prev }), GateInstruction::RotationZ { angle }) =
        (out.last_mut(), &rz)
    {
        *prev += angle;
        if is_identity_angle(*prev) {
            out.pop();
        }
        return;
    }
    out.push(rz);
}

/// Exact peephole simplification of the step body.
///
/// Merges adjacent displacements with equal quadrature angles, moves a
/// quarter-turn `R_z` past a displacement (flipping its sign) when that lets
/// two displacements merge, merges and drops trivial rotations, and cancels
/// Hadamard pairs. Every rewrite is an operator identity.
pub fn fuse_displacements(program: &GateProgram) -> GateProgram {
    let mut step = program.step().to_vec();
    loop {
        let (next, changed) = sweep(step);
        step = next;
        if !changed {
            break;
        }
    }
    program.with_step(step, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::ir::{ProgramMetadata, Splitting};
    use crate::compiler::qsp::{compile_trig_gate, TrigGateParams, TrigKind};
    use crate::hilbert::ModeSpace;

    fn program(step: Vec<GateInstruction>) -> GateProgram {
        let meta = ProgramMetadata {
            max_order: 1,
            dt: 0.1,
            splitting: Splitting::LieTrotter,
            hamiltonian_digest: String::new(),
            fused: false,
        };
        GateProgram::new(ModeSpace::hybrid(4, 1).unwrap(), step, 1, false, meta).unwrap()
    }

    #[test]
    fn cosine_gate_loses_one_displacement() {
        let g = compile_trig_gate(&TrigGateParams::new(vec![1.0], 0.1, TrigKind::Cosine, vec![0.0]));
        let fused = fuse_displacements(&program(g));
        assert_eq!(fused.conditional_displacement_count(), 3);
        let kappas: Vec<f64> = fused
            .step()
            .iter()
            .filter_map(|i| match i {
                GateInstruction::ConditionalDisplacement { kappa, .. } => Some(kappa[0]),
                _ => None,
            })
            .collect();
        assert_eq!(kappas, vec![-0.5, -1.0, 0.5]);
        assert!(fused.metadata().fused);
    }

    #[test]
    fn untouched_without_adjacency() {
        let step = vec![
            GateInstruction::ConditionalDisplacement { kappa: vec![0.3], angles: vec![0.0] },
            GateInstruction::RotationZ { angle: 0.2 },
            GateInstruction::ConditionalDisplacement { kappa: vec![0.3], angles: vec![0.0] },
        ];
        let p = program(step.clone());
        assert_eq!(fuse_displacements(&p).step(), step.as_slice());
    }

    #[test]
    fn trivial_instructions_removed() {
        let step = vec![
            GateInstruction::RotationZ { angle: 0.0 },
            GateInstruction::HadamardYZ,
            GateInstruction::HadamardYZ,
            GateInstruction::ConditionalDisplacement { kappa: vec![0.0], angles: vec![0.0] },
            GateInstruction::RotationZ { angle: 1.0 },
            GateInstruction::RotationZ { angle: -1.0 },
        ];
        assert!(fuse_displacements(&program(step)).step().is_empty());
    }

    #[test]
    fn different_angles_do_not_merge() {
        let step = vec![
            GateInstruction::ConditionalDisplacement { kappa: vec![0.3], angles: vec![0.0] },
            GateInstruction::ConditionalDisplacement { kappa: vec![0.3], angles: vec![1.0] },
        ];
        assert_eq!(fuse_displacements(&program(step)).conditional_displacement_count(), 2);
    }
}
