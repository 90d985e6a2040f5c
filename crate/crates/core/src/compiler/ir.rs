use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::text::fmt_f64;
use crate::hilbert::ModeSpace;

/// One instruction of a hybrid qubit-oscillator program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateInstruction {
    /// `exp(i φ σ_z)`.
    RotationZ { angle: f64 },
    /// `(σ_y + σ_z)/√2`.
    HadamardYZ,
    /// `exp(i σ_x Σ_n κ_n Q_n^{θ_n})`.
    ConditionalDisplacement { kappa: Vec<f64>, angles: Vec<f64> },
    /// `exp(-i t Σ_n ω_n/2 (X_n² + P_n²))` on the oscillators.
    FreeEvolution { duration: f64, frequencies: Vec<f64> },
    /// Project the qubit onto `|↑⟩` and renormalize.
    PostSelectUp,
}

impl GateInstruction {
    pub fn is_conditional_displacement(&self) -> bool {
        matches!(self, GateInstruction::ConditionalDisplacement { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GateInstruction::RotationZ { .. } => "rz",
            GateInstruction::HadamardYZ => "hyz",
            GateInstruction::ConditionalDisplacement { .. } => "cd",
            GateInstruction::FreeEvolution { .. } => "free",
            GateInstruction::PostSelectUp => "postselect_up",
        }
    }

    fn check(&self, num_modes: usize) -> Result<()> {
        let vectors: &[&Vec<f64>] = match self {
            GateInstruction::ConditionalDisplacement { kappa, angles } => &[kappa, angles],
            GateInstruction::FreeEvolution { frequencies, .. } => &[frequencies],
            _ => &[],
        };
        for v in vectors {
            if v.len() != num_modes {
                return Err(Error::DimensionMismatch {
                    expected: num_modes,
                    actual: v.len(),
                });
            }
        }
        let finite = match self {
            GateInstruction::RotationZ { angle } => angle.is_finite(),
            GateInstruction::FreeEvolution { duration, .. } => duration.is_finite(),
            _ => true,
        } && vectors.iter().all(|v| v.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::NonFinite(format!("{} instruction parameter", self.tag())));
        }
        Ok(())
    }

    fn write_record(&self, out: &mut String) {
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ");
        match self {
            GateInstruction::RotationZ { angle } => writeln!(out, "rz {}", fmt_f64(*angle)),
            GateInstruction::HadamardYZ => writeln!(out, "hyz"),
            GateInstruction::ConditionalDisplacement { kappa, angles } => {
                writeln!(out, "cd {} | {}", join(kappa), join(angles))
            }
            GateInstruction::FreeEvolution {
                duration,
                frequencies,
            } => writeln!(out, "free {} | {}", fmt_f64(*duration), join(frequencies)),
            GateInstruction::PostSelectUp => writeln!(out, "postselect_up"),
        }
        .unwrap();
    }

    fn parse_record(line_no: usize, line: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let floats = |s: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| bad(format!("`{t}`: {e}"))))
                .collect()
        };
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        let halves = || {
            rest.split_once('|')
                .ok_or_else(|| bad(format!("`{tag}` record needs a `|` separator")))
        };
        match tag {
            "rz" => {
                let v = floats(rest)?;
                match v.as_slice() {
                    [angle] => Ok(GateInstruction::RotationZ { angle: *angle }),
                    _ => Err(bad("rz takes one angle".into())),
                }
            }
            "hyz" if rest.trim().is_empty() => Ok(GateInstruction::HadamardYZ),
            "cd" => {
                let (k, a) = halves()?;
                Ok(GateInstruction::ConditionalDisplacement {
                    kappa: floats(k)?,
                    angles: floats(a)?,
                })
            }
            "free" => {
                let (t, w) = halves()?;
                match floats(t)?.as_slice() {
                    [duration] => Ok(GateInstruction::FreeEvolution {
                        duration: *duration,
                        frequencies: floats(w)?,
                    }),
                    _ => Err(bad("free takes one duration".into())),
                }
            }
            "postselect_up" if rest.trim().is_empty() => Ok(GateInstruction::PostSelectUp),
            other => Err(bad(format!("unknown record `{other}`"))),
        }
    }
}

/// How the quadratic and anharmonic parts are interleaved in one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    /// Free evolution, then the potential.
    #[default]
    LieTrotter,
    /// Half free evolution, potential, half free evolution.
    Strang,
}

impl Splitting {
    pub fn as_str(&self) -> &'static str {
        match self {
            Splitting::LieTrotter => "lie-trotter",
            Splitting::Strang => "strang",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "lie-trotter" => Some(Splitting::LieTrotter),
            "strang" => Some(Splitting::Strang),
            _ => None,
        }
    }
}

/// Normalization label written into every program; the Hadamard here is unitary.
pub const HADAMARD_NORMALIZATION: &str = "(sigma_y+sigma_z)/sqrt2";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgramMetadata {
    pub max_order: usize,
    pub dt: f64,
    pub splitting: Splitting,
    pub hamiltonian_digest: String,
    pub fused: bool,
}

/// A compiled program: one Trotter step repeated `repetitions` times, then an
/// optional `PostSelectUp`.
///
/// The step body is stored once; [`GateProgram::instructions`] expands it.
#[derive(Clone, Debug, PartialEq)]
pub struct GateProgram {
    space: ModeSpace,
    step: Vec<GateInstruction>,
    repetitions: usize,
    postselect: bool,
    metadata: ProgramMetadata,
}

impl GateProgram {
    pub fn new(
        space: ModeSpace,
        step: Vec<GateInstruction>,
        repetitions: usize,
        postselect: bool,
        metadata: ProgramMetadata,
    ) -> Result<Self> {
        for inst in &step {
            if matches!(inst, GateInstruction::PostSelectUp) {
                return Err(Error::InvalidParameter(
                    "PostSelectUp may only be the final instruction".into(),
                ));
            }
            inst.check(space.num_modes())?;
        }
        if postselect && !space.qubit_present() {
            return Err(Error::InvalidParameter("postselection needs a qubit".into()));
        }
        Ok(Self {
            space,
            step,
            repetitions,
            postselect,
            metadata,
        })
    }

    /// The program with no instructions.
    pub fn empty(space: ModeSpace) -> Self {
        Self {
            space,
            step: Vec::new(),
            repetitions: 0,
            postselect: false,
            metadata: ProgramMetadata {
                max_order: 0,
                dt: 0.0,
                splitting: Splitting::LieTrotter,
                hamiltonian_digest: String::new(),
                fused: false,
            },
        }
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn step(&self) -> &[GateInstruction] {
        &self.step
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    pub fn postselect(&self) -> bool {
        self.postselect
    }

    pub fn metadata(&self) -> &ProgramMetadata {
        &self.metadata
    }

    pub(crate) fn with_step(&self, step: Vec<GateInstruction>, fused: bool) -> Self {
        let mut out = self.clone();
        out.step = step;
        out.metadata.fused = fused;
        out
    }

    /// Full instruction stream, including the final marker.
    pub fn instructions(&self) -> impl Iterator<Item = &GateInstruction> + '_ {
        const MARKER: GateInstruction = GateInstruction::PostSelectUp;
        (0..self.repetitions)
            .flat_map(move |_| self.step.iter())
            .chain(self.postselect.then_some(&MARKER))
    }

    pub fn instruction_count(&self) -> usize {
        self.step.len() * self.repetitions + usize::from(self.postselect)
    }

    pub fn conditional_displacement_count(&self) -> usize {
        self.count(|i| i.is_conditional_displacement())
    }

    pub fn count(&self, pred: impl Fn(&GateInstruction) -> bool) -> usize {
        self.step.iter().filter(|i| pred(i)).count() * self.repetitions
            + usize::from(self.postselect && pred(&GateInstruction::PostSelectUp))
    }

    /// Simulated time covered by the program.
    pub fn total_time(&self) -> f64 {
        let per_step: f64 = self
            .step
            .iter()
            .map(|i| match i {
                GateInstruction::FreeEvolution { duration, .. } => *duration,
                _ => 0.0,
            })
            .sum();
        per_step * self.repetitions as f64
    }

    fn body_text(&self) -> String {
        let mut body = String::new();
        writeln!(body, "begin_step").unwrap();
        for inst in &self.step {
            inst.write_record(&mut body);
        }
        writeln!(body, "end_step").unwrap();
        if self.postselect {
            GateInstruction::PostSelectUp.write_record(&mut body);
        }
        body
    }

    fn header_text(&self) -> String {
        let m = &self.metadata;
        let mut h = String::new();
        writeln!(h, "modes = {}", self.space.num_modes()).unwrap();
        writeln!(h, "truncation_dim = {}", self.space.truncation_dim()).unwrap();
        writeln!(h, "qubit = {}", self.space.qubit_present()).unwrap();
        writeln!(h, "dt = {}", fmt_f64(m.dt)).unwrap();
        writeln!(h, "repetitions = {}", self.repetitions).unwrap();
        writeln!(h, "max_order = {}", m.max_order).unwrap();
        writeln!(h, "splitting = {}", m.splitting.as_str()).unwrap();
        writeln!(h, "fused = {}", m.fused).unwrap();
        writeln!(h, "hadamard = {HADAMARD_NORMALIZATION}").unwrap();
        writeln!(h, "hamiltonian_digest = {}", m.hamiltonian_digest).unwrap();
        h
    }

    /// SHA-256 over the header fields and instruction records.
    pub fn content_digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.header_text());
        hasher.update(self.body_text());
        hex::encode(hasher.finalize())
    }

    /// Line-oriented IR: `key = value` header, then `begin_step` … `end_step`
    /// around the repeated body and an optional `postselect_up` record.
    pub fn to_ir(&self) -> String {
        format!(
            "# gate-program v1\n{}content_digest = {}\n{}",
            self.header_text(),
            self.content_digest(),
            self.body_text()
        )
    }

    pub fn from_ir(text: &str) -> Result<Self> {
        let mut header = std::collections::HashMap::new();
        let mut step = Vec::new();
        let mut in_step = false;
        let mut saw_step = false;
        let mut postselect = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| Error::Parse {
                line: line_no,
                message: message.into(),
            };
            if postselect {
                return Err(bad("records after postselect_up"));
            }
            match line {
                "begin_step" if !saw_step => {
                    in_step = true;
                    saw_step = true;
                }
                "end_step" if in_step => in_step = false,
                _ if in_step => step.push(GateInstruction::parse_record(line_no, line)?),
                "postselect_up" if saw_step => postselect = true,
                _ if !saw_step => {
                    let (k, v) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
                    header.insert(k.trim().to_string(), (line_no, v.trim().to_string()));
                }
                _ => return Err(bad("unexpected record outside the step body")),
            }
        }
        if in_step || !saw_step {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: "missing begin_step/end_step".into(),
            });
        }
        let get = |key: &str| -> Result<(usize, String)> {
            header.get(key).cloned().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing header `{key}`"),
            })
        };
        fn parse<T: std::str::FromStr>((line, v): (usize, String)) -> Result<T> {
            v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad value `{v}`"),
            })
        }
        let space = ModeSpace::new(
            parse(get("truncation_dim")?)?,
            parse(get("modes")?)?,
            parse(get("qubit")?)?,
        )?;
        let (line, split) = get("splitting")?;
        let splitting = Splitting::parse(&split).ok_or(Error::Parse {
            line,
            message: format!("unknown splitting `{split}`"),
        })?;
        let metadata = ProgramMetadata {
            max_order: parse(get("max_order")?)?,
            dt: parse(get("dt")?)?,
            splitting,
            hamiltonian_digest: get("hamiltonian_digest")?.1,
            fused: parse(get("fused")?)?,
        };
        let program = Self::new(space, step, parse(get("repetitions")?)?, postselect, metadata)?;
        let (line, digest) = get("content_digest")?;
        if digest != program.content_digest() {
            return Err(Error::Parse {
                line,
                message: "content digest does not match the records".into(),
            });
        }
        Ok(program)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GateProgram {
        let space = ModeSpace::hybrid(8, 2).unwrap();
        let step = vec![
            GateInstruction::FreeEvolution {
                duration: 0.1,
                frequencies: vec![1.0, 0.5],
            },
            GateInstruction::RotationZ { angle: std::f64::consts::FRAC_PI_2 },
            GateInstruction::ConditionalDisplacement {
                kappa: vec![0.5, -0.25],
                angles: vec![0.0, 0.0],
            },
            GateInstruction::HadamardYZ,
        ];
        let meta = ProgramMetadata {
            max_order: 3,
            dt: 0.1,
            splitting: Splitting::LieTrotter,
            hamiltonian_digest: "abc".into(),
            fused: false,
        };
        GateProgram::new(space, step, 3, true, meta).unwrap()
    }

    #[test]
    fn counts_and_expansion() {
        let p = sample();
        assert_eq!(p.instruction_count(), 13);
        assert_eq!(p.instructions().count(), 13);
        assert_eq!(p.conditional_displacement_count(), 3);
        assert_eq!(p.instructions().last(), Some(&GateInstruction::PostSelectUp));
        assert!((p.total_time() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ir_round_trip() {
        let p = sample();
        let text = p.to_ir();
        assert_eq!(GateProgram::from_ir(&text).unwrap(), p);
        assert_eq!(p.to_ir(), text);
    }

    #[test]
    fn ir_tampering_detected() {
        let text = sample().to_ir().replace("cd 5.0000000000000000e-1", "cd 6.0000000000000000e-1");
        assert!(matches!(GateProgram::from_ir(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn marker_only_at_end() {
        let space = ModeSpace::hybrid(4, 1).unwrap();
        let meta = sample().metadata().clone();
        assert!(GateProgram::new(space, vec![GateInstruction::PostSelectUp], 1, false, meta.clone()).is_err());
        let cd = GateInstruction::ConditionalDisplacement { kappa: vec![f64::NAN], angles: vec![0.0] };
        assert!(GateProgram::new(space, vec![cd], 1, false, meta).is_err());
    }
}
