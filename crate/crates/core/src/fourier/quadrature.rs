use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use super::potential::PotentialSpec;
use super::series::{CoefficientGrid, FourierSeries, DEFAULT_PRUNE_THRESHOLD};
use crate::error::{Error, Result};

/// `max(64, 4 N_F + 8)` points per axis.
pub fn default_points_per_dim(max_order: usize) -> usize {
    (4 * max_order + 8).max(64)
}

/// Series from a Gauss-Legendre product rule with `points_per_dim` nodes per axis.
pub fn coefficients_quadrature(
    spec: &PotentialSpec,
    max_order: usize,
    points_per_dim: usize,
) -> Result<FourierSeries> {
    let grid = quadrature_grid(spec, max_order, points_per_dim)?;
    Ok(FourierSeries::from_grid(&grid, spec, DEFAULT_PRUNE_THRESHOLD))
}

/// Complex coefficients `C_m` on the full index cube, before any symmetrization.
pub fn quadrature_grid(
    spec: &PotentialSpec,
    max_order: usize,
    points_per_dim: usize,
) -> Result<CoefficientGrid> {
    if points_per_dim < 4 * max_order || points_per_dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "points_per_dim = {points_per_dim} is below the 4*N_F = {} margin",
            4 * max_order
        )));
    }
    let n = spec.num_modes();
    let rule = GaussLegendre::new(points_per_dim)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let pairs = rule.as_node_weight_pairs();

    // Scaled nodes and weights per axis.
    let axes: Vec<(Vec<f64>, Vec<f64>)> = spec
        .domain_lengths()
        .iter()
        .map(|&l| {
            let h = l / 2.0;
            pairs.iter().map(|&(t, w)| (h * t, h * w)).unzip()
        })
        .collect();

    let p = points_per_dim;
    let total = p.checked_pow(n as u32).ok_or_else(|| {
        Error::InvalidParameter(format!("{p}^{n} quadrature points overflow"))
    })?;
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut point = vec![0.0; n];
            let mut rest = flat;
            for axis in (0..n).rev() {
                point[axis] = axes[axis].0[rest % p];
                rest /= p;
            }
            spec.evaluate(&point)
        })
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("potential value at quadrature node {i}")));
    }

    let side = 2 * max_order + 1;
    let mut data: Vec<Complex64> = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    // Contract one axis at a time: F[.., j, ..] -> G[.., m, ..].
    for (axis, (nodes, weights)) in axes.iter().enumerate() {
        let k = 2.0 * PI / spec.domain_lengths()[axis];
        let table: Vec<Complex64> = (0..side)
            .flat_map(|mi| {
                let m = mi as f64 - max_order as f64;
                nodes
                    .iter()
                    .zip(weights)
                    .map(move |(&x, &w)| Complex64::from_polar(w, -m * k * x))
            })
            .collect();
        let outer = side.pow(axis as u32);
        let inner = p.pow((n - axis - 1) as u32);
        let mut next = vec![Complex64::new(0.0, 0.0); outer * side * inner];
        for o in 0..outer {
            for mi in 0..side {
                let row = &table[mi * p..(mi + 1) * p];
                let dst = &mut next[(o * side + mi) * inner..(o * side + mi + 1) * inner];
                for (j, &t) in row.iter().enumerate() {
                    let src = &data[(o * p + j) * inner..(o * p + j + 1) * inner];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += t * s;
                    }
                }
            }
        }
        data = next;
    }
    let volume: f64 = spec.domain_lengths().iter().product();
    for c in &mut data {
        *c /= volume;
    }
    Ok(CoefficientGrid::new(n, max_order, data))
}
