//! Parameter scans of the tangency set and the analytic density lower bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{select_parameters, ParameterRegion, UnfoldingModel};
use crate::error::{Error, Result};
use crate::intersect::{intersection_test, IntersectionVerdict};
use crate::kronecker::ExponentPair;

pub const MIN_GRID_RES: usize = 64;

/// Mask codes of a scan cell.
pub const CELL_OUTSIDE: u8 = 0;
pub const CELL_EMPTY: u8 = 1;
pub const CELL_UNKNOWN: u8 = 2;
pub const CELL_TANGENT: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub eps: f64,
    pub grid_res: usize,
    pub depth: usize,
    pub margin: f64,
    /// Cells whose center lies in `εD`.
    pub inside: usize,
    pub tangent: usize,
    pub unknown: usize,
    pub empty: usize,
    /// `tangent / inside`.
    pub fraction: f64,
    /// Row-major cell codes, row `j` holding `Im μ` increasing with `j`.
    #[serde(skip)]
    pub mask: Vec<u8>,
}

impl ScanRow {
    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        cell_center(self.eps, self.grid_res, i, j)
    }
}

fn cell_center(eps: f64, res: usize, i: usize, j: usize) -> Complex64 {
    let t = |k: usize| -1.0 + (2 * k + 1) as f64 / res as f64;
    eps * Complex64::new(t(i), t(j))
}

/// Scan depth that resolves the scale `ε` with `extra` further levels.
pub fn depth_for_scale(model: &UnfoldingModel, eps: f64, extra: usize) -> usize {
    extra + ((1.0 / eps).ln() / model.lambda_u.norm().ln()).ceil().max(0.0) as usize
}

/// Marks the cells of a `grid_res²` grid over `εD` whose parameter gives a robust
/// intersection of `hᵘ_μ(Kᵘ_μ)` and `hˢ_μ(Kˢ_μ)`.
pub fn scan_tangency_set(model: &UnfoldingModel, eps: f64, grid_res: usize, depth: usize, margin: f64) -> Result<ScanRow> {
    if grid_res < MIN_GRID_RES {
        return Err(Error::InvalidArgument(format!("grid resolution {grid_res} below {MIN_GRID_RES}")));
    }
    if !(eps > 0.0) || eps > model.validity_radius {
        return Err(Error::OutsideValidity { mu: format!("ε = {eps}"), radius: model.validity_radius });
    }
    let mask: Vec<u8> = (0..grid_res * grid_res)
        .into_par_iter()
        .map(|k| {
            let mu = cell_center(eps, grid_res, k % grid_res, k / grid_res);
            if mu.norm() >= eps {
                return Ok(CELL_OUTSIDE);
            }
            let (u, s) = model.configured_sets(mu)?;
            Ok(match intersection_test(&u, &s, depth, margin) {
                IntersectionVerdict::RobustNonempty { .. } => CELL_TANGENT,
                IntersectionVerdict::Unknown { .. } => CELL_UNKNOWN,
                IntersectionVerdict::CertifiedEmpty { .. } => CELL_EMPTY,
            })
        })
        .collect::<Result<_>>()?;
    let count = |code: u8| mask.iter().filter(|&&x| x == code).count();
    let (tangent, unknown, empty) = (count(CELL_TANGENT), count(CELL_UNKNOWN), count(CELL_EMPTY));
    let inside = tangent + unknown + empty;
    Ok(ScanRow {
        eps,
        grid_res,
        depth,
        margin,
        inside,
        tangent,
        unknown,
        empty,
        fraction: if inside == 0 { 0.0 } else { tangent as f64 / inside as f64 },
        mask,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub grid_res: usize,
    pub rows: Vec<ScanRow>,
    /// Minimum fraction over the ladder.
    pub liminf_proxy: f64,
}

/// One scan per `ε`, each at `depth_for_scale(ε, extra_depth)`.
pub fn density_ladder(model: &UnfoldingModel, eps: &[f64], grid_res: usize, extra_depth: usize, margin: f64) -> Result<DensityEstimate> {
    let rows = eps
        .iter()
        .map(|&e| scan_tangency_set(model, e, grid_res, depth_for_scale(model, e, extra_depth), margin))
        .collect::<Result<Vec<_>>>()?;
    let liminf_proxy = rows.iter().map(|r| r.fraction).fold(f64::INFINITY, f64::min);
    Ok(DensityEstimate { grid_res, rows, liminf_proxy })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedPair {
    pub m: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBound {
    pub nu: Complex64,
    pub delta: f64,
    pub eps: f64,
    pub m_gap: u32,
    pub m0: Option<u32>,
    pub kept: Vec<ParameterRegion>,
    pub dropped: Vec<DroppedPair>,
    /// Area of the kept regions over `πε²`.
    pub selected_value: f64,
    /// `area(m0)·Σ_j |λᵘ|^{-2Mj} / πε²`.
    pub value: f64,
}

/// `Σ_{j≥0} x^{-2(m0 + M j)}` in closed form.
pub fn geometric_sum(x: f64, m0: u32, m_gap: u32) -> f64 {
    x.powi(-2 * m0 as i32) / (1.0 - x.powi(-2 * m_gap as i32))
}

/// Lower bound for the tangency-set fraction of `εD` from the selected parameter regions.
///
/// Regions leaving `εD` or overlapping an earlier region are dropped and reported.
pub fn density_lower_bound(
    model: &UnfoldingModel,
    nu: Complex64,
    delta: f64,
    eps: f64,
    pairs: &[ExponentPair],
    m_gap: u32,
) -> Result<DensityBound> {
    if pairs.is_empty() {
        return Err(Error::InsufficientPairs { found: 0, needed: 1 });
    }
    if m_gap == 0 {
        return Err(Error::InvalidArgument("gap bound M must be positive".into()));
    }
    let mut ms: Vec<u32> = pairs.iter().map(|p| p.m).collect();
    ms.sort_unstable();
    ms.dedup();
    let mut kept: Vec<ParameterRegion> = Vec::new();
    let mut dropped = Vec::new();
    for m in ms {
        let region = select_parameters(model, nu, delta, m)?;
        if region.center.norm() + region.outer_radius > eps {
            dropped.push(DroppedPair { m, reason: "outside the ε-disk".into() });
        } else if let Some(k) = kept.iter().find(|k| !k.disjoint_from(&region)) {
            dropped.push(DroppedPair { m, reason: format!("overlaps the region of m = {}", k.m) });
        } else {
            kept.push(region);
        }
    }
    let norm = PI * eps * eps;
    let selected_value = kept.iter().fold(0.0, |s, k| s + k.area) / norm;
    let m0 = kept.first().map(|k| k.m);
    let value = match kept.first() {
        // area(m) = area(m0)·|λᵘ|^{-2(m - m0)}
        Some(k) => k.area * geometric_sum(model.lambda_u.norm(), 0, m_gap) / norm,
        None => 0.0,
    };
    Ok(DensityBound { nu, delta, eps, m_gap, m0, kept, dropped, selected_value, value })
}
