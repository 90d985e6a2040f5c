use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::potential::PotentialSpec;
use crate::error::{Error, Result};
use crate::text::fmt_f64;

/// Absolute threshold below which a coefficient is dropped from a series.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;

/// All complex coefficients `C_m` for `m ∈ {-N_F..N_F}^N`.
#[derive(Clone, Debug)]
pub struct CoefficientGrid {
    num_modes: usize,
    max_order: usize,
    values: Vec<Complex64>,
}

impl CoefficientGrid {
    pub(crate) fn new(num_modes: usize, max_order: usize, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), (2 * max_order + 1).pow(num_modes as u32));
        Self {
            num_modes,
            max_order,
            values,
        }
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn index(&self, m: &[i64]) -> Option<usize> {
        let side = 2 * self.max_order as i64 + 1;
        let mut idx = 0i64;
        for &mn in m {
            if mn.unsigned_abs() as usize > self.max_order {
                return None;
            }
            idx = idx * side + mn + self.max_order as i64;
        }
        Some(idx as usize)
    }

    pub fn get(&self, m: &[i64]) -> Option<Complex64> {
        if m.len() != self.num_modes {
            return None;
        }
        self.index(m).map(|i| self.values[i])
    }

    /// All multi-indices in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        multi_indices(self.num_modes, self.max_order)
    }
}

/// `{-max..max}^n` in lexicographic order.
pub(crate) fn multi_indices(n: usize, max: usize) -> impl Iterator<Item = Vec<i64>> {
    let side = 2 * max + 1;
    let total = side.pow(n as u32);
    (0..total).map(move |mut flat| {
        let mut m = vec![0i64; n];
        for slot in m.iter_mut().rev() {
            *slot = (flat % side) as i64 - max as i64;
            flat /= side;
        }
        m
    })
}

/// Non-zero multi-indices whose first non-zero entry is positive, one per `±m` pair.
pub fn canonical_indices(n: usize, max: usize) -> impl Iterator<Item = Vec<i64>> {
    multi_indices(n, max).filter(|m| matches!(m.iter().find(|&&x| x != 0), Some(&x) if x > 0))
}

/// One harmonic `A cos(μ·q) + B sin(μ·q)` with `μ_n = m_n k_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTerm {
    pub m: Vec<i64>,
    pub a: f64,
    pub b: f64,
}

/// Real sine/cosine expansion of a potential on a box.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    domain_lengths: Vec<f64>,
    angles: Vec<f64>,
    max_order: usize,
    prune_threshold: f64,
    constant: f64,
    terms: Vec<FourierTerm>,
}

impl FourierSeries {
    /// Converts `C_m` to `A = 2 Re C_m`, `B = -2 Im C_m` on canonical indices and prunes.
    pub fn from_grid(grid: &CoefficientGrid, spec: &PotentialSpec, prune_threshold: f64) -> Self {
        let n = grid.num_modes();
        let constant = grid.get(&vec![0; n]).map(|c| c.re).unwrap_or(0.0);
        let mut terms = Vec::new();
        for m in canonical_indices(n, grid.max_order()) {
            let c = grid.get(&m).expect("index in range");
            let mut a = 2.0 * c.re;
            let mut b = -2.0 * c.im;
            if a.abs() < prune_threshold {
                a = 0.0;
            }
            if b.abs() < prune_threshold {
                b = 0.0;
            }
            if a != 0.0 || b != 0.0 {
                terms.push(FourierTerm { m, a, b });
            }
        }
        Self {
            domain_lengths: spec.domain_lengths().to_vec(),
            angles: spec.angles().to_vec(),
            max_order: grid.max_order(),
            prune_threshold,
            constant,
            terms,
        }
    }

    /// Builds a series directly from its parts; terms are sorted into canonical order.
    pub fn from_terms(
        domain_lengths: Vec<f64>,
        angles: Vec<f64>,
        max_order: usize,
        constant: f64,
        mut terms: Vec<FourierTerm>,
    ) -> Result<Self> {
        let n = domain_lengths.len();
        if angles.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: angles.len(),
            });
        }
        for t in &terms {
            if t.m.len() != n || !(t.a.is_finite() && t.b.is_finite()) {
                return Err(Error::InvalidParameter(format!("bad Fourier term {t:?}")));
            }
            if !matches!(t.m.iter().find(|&&x| x != 0), Some(&x) if x > 0) {
                return Err(Error::InvalidParameter(format!(
                    "multi-index {:?} is not canonical",
                    t.m
                )));
            }
        }
        terms.sort_by(|x, y| x.m.cmp(&y.m));
        Ok(Self {
            domain_lengths,
            angles,
            max_order,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            constant,
            terms,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.domain_lengths.len()
    }

    pub fn domain_lengths(&self) -> &[f64] {
        &self.domain_lengths
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    /// `A_0`; contributes only a global phase to the dynamics.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn wavevector(&self, mode: usize) -> f64 {
        2.0 * PI / self.domain_lengths[mode]
    }

    /// `μ = (m_1 k_1, …, m_N k_N)`.
    pub fn mu(&self, m: &[i64]) -> Vec<f64> {
        m.iter()
            .enumerate()
            .map(|(n, &mn)| mn as f64 * self.wavevector(n))
            .collect()
    }

    pub fn cosine_count(&self) -> usize {
        self.terms.iter().filter(|t| t.a != 0.0).count()
    }

    pub fn sine_count(&self) -> usize {
        self.terms.iter().filter(|t| t.b != 0.0).count()
    }

    /// Largest number of modes coupled by a single harmonic.
    pub fn modes_per_term(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.m.iter().filter(|&&x| x != 0).count())
            .max()
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|t| {
                    let phase: f64 = self.mu(&t.m).iter().zip(point).map(|(mu, q)| mu * q).sum();
                    t.a * phase.cos() + t.b * phase.sin()
                })
                .sum::<f64>()
    }

    /// Series without its constant term, i.e. what the compiler actually emits.
    pub fn evaluate_dynamic(&self, point: &[f64]) -> f64 {
        self.evaluate(point) - self.constant
    }

    /// Structured-text table: a header of `key = value` lines, then one row
    /// `m_1 … m_N A B` per harmonic. Floats carry 17 significant digits.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ");
        writeln!(out, "# fourier-series v1").unwrap();
        writeln!(out, "modes = {}", self.num_modes()).unwrap();
        writeln!(out, "max_order = {}", self.max_order).unwrap();
        writeln!(out, "domain_lengths = {}", join(&self.domain_lengths)).unwrap();
        writeln!(out, "angles = {}", join(&self.angles)).unwrap();
        writeln!(out, "prune_threshold = {}", fmt_f64(self.prune_threshold)).unwrap();
        writeln!(out, "constant = {}", fmt_f64(self.constant)).unwrap();
        let cols: Vec<String> = (1..=self.num_modes()).map(|n| format!("m_{n}")).collect();
        writeln!(out, "# {} A B", cols.join(" ")).unwrap();
        for t in &self.terms {
            let ms: Vec<String> = t.m.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{} {} {}", ms.join(" "), fmt_f64(t.a), fmt_f64(t.b)).unwrap();
        }
        out
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let mut header = std::collections::HashMap::new();
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((k, v)) = line.split_once('=') {
                header.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
            } else {
                rows.push((i + 1, line.to_string()));
            }
        }
        let get = |key: &str| {
            header.get(key).cloned().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing header `{key}`"),
            })
        };
        let floats = |(line, v): (usize, String)| -> Result<Vec<f64>> {
            v.split_whitespace()
                .map(|s| {
                    s.parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        message: e.to_string(),
                    })
                })
                .collect()
        };
        let single = |kv: (usize, String)| -> Result<f64> {
            let line = kv.0;
            floats(kv)?.first().copied().ok_or(Error::Parse {
                line,
                message: "empty value".into(),
            })
        };
        let (line, modes) = get("modes")?;
        let n: usize = modes.parse().map_err(|_| Error::Parse {
            line,
            message: "bad mode count".into(),
        })?;
        let (line, order) = get("max_order")?;
        let max_order: usize = order.parse().map_err(|_| Error::Parse {
            line,
            message: "bad max_order".into(),
        })?;
        let domain_lengths = floats(get("domain_lengths")?)?;
        let angles = floats(get("angles")?)?;
        let prune_threshold = single(get("prune_threshold")?)?;
        let constant = single(get("constant")?)?;
        let mut terms = Vec::with_capacity(rows.len());
        for (line, row) in rows {
            let fields: Vec<&str> = row.split_whitespace().collect();
            if fields.len() != n + 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", n + 2, fields.len()),
                });
            }
            let bad = |message: String| Error::Parse { line, message };
            let m = fields[..n]
                .iter()
                .map(|s| s.parse::<i64>().map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let a = fields[n].parse::<f64>().map_err(|e| bad(e.to_string()))?;
            let b = fields[n + 1].parse::<f64>().map_err(|e| bad(e.to_string()))?;
            terms.push(FourierTerm { m, a, b });
        }
        let mut series = Self::from_terms(domain_lengths, angles, max_order, constant, terms)?;
        series.prune_threshold = prune_threshold;
        Ok(series)
    }
}

/// Dense-grid comparison between a series and its source potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionError {
    pub max_abs: f64,
    pub rms: f64,
}

/// Compares on `samples_per_dim` cell-centred points per axis inside the box.
///
/// The constant term is included, so this measures `|V - V^F|` pointwise.
pub fn reconstruction_error(
    series: &FourierSeries,
    spec: &PotentialSpec,
    samples_per_dim: usize,
) -> Result<ReconstructionError> {
    if samples_per_dim == 0 {
        return Err(Error::InvalidParameter("samples_per_dim must be positive".into()));
    }
    if series.num_modes() != spec.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: spec.num_modes(),
            actual: series.num_modes(),
        });
    }
    let n = spec.num_modes();
    let lengths = spec.domain_lengths();
    let total = samples_per_dim.pow(n as u32);
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0;
    let mut point = vec![0.0; n];
    for flat in 0..total {
        let mut rest = flat;
        for axis in (0..n).rev() {
            let j = rest % samples_per_dim;
            rest /= samples_per_dim;
            let l = lengths[axis];
            point[axis] = -l / 2.0 + (j as f64 + 0.5) * l / samples_per_dim as f64;
        }
        let err = (series.evaluate(&point) - spec.evaluate(&point)).abs();
        max_abs = max_abs.max(err);
        sum_sq += err * err;
    }
    Ok(ReconstructionError {
        max_abs,
        rms: (sum_sq / total as f64).sqrt(),
    })
}
