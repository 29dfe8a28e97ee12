//! Density of `z^m w^n`: genericity of `(z, w)` and exponent-pair search.
//!
//! Write `z = R e^{ia}` and `w = r e^{ib}`. The products `z^m w^n` are dense when
//! `a log r - b log R`, `π log R` and `π log r` admit no rational relation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_COEFF_BOUND: i64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Genericity {
    Generic,
    /// `p·X + q·Y + s·Z ≈ 0` with `(p, q, s) = relation`.
    Resonant { relation: (i64, i64, i64), residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    /// `a log r - b log R`
    pub x: f64,
    /// `π log R`
    pub y: f64,
    /// `π log r`
    pub z: f64,
    pub verdict: Genericity,
    pub tol: f64,
    pub coeff_bound: i64,
    /// `2π log r / X`, when `X` is not degenerate.
    pub c: Option<f64>,
    /// `2π log R / X`, when `X` is not degenerate.
    pub d: Option<f64>,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        self.verdict == Genericity::Generic
    }
}

fn check_regime(z: Complex64, w: Complex64) -> Result<()> {
    if !(z.norm() > 1.0 && w.norm() < 1.0 && w.norm() > 0.0) || !z.is_finite() || !w.is_finite() {
        return Err(Error::InvalidArgument(format!("need |z| > 1 > |w| > 0, got z = {z}, w = {w}")));
    }
    Ok(())
}

/// Exhaustive search for integer relations `p·X + q·Y + s·Z` with coefficients in
/// `[-coeff_bound, coeff_bound]`. The first relation of smallest max-norm is reported.
pub fn genericity_check(z: Complex64, w: Complex64, tol: f64, coeff_bound: i64) -> Result<GenericityReport> {
    check_regime(z, w)?;
    if !(tol > 0.0) || coeff_bound < 1 {
        return Err(Error::InvalidArgument("tolerance and coefficient bound must be positive".into()));
    }
    let (big_r, a) = (z.norm(), z.arg());
    let (small_r, b) = (w.norm(), w.arg());
    let x = a * small_r.ln() - b * big_r.ln();
    let y = PI * big_r.ln();
    let zz = PI * small_r.ln();
    let mut best: Option<(i64, (i64, i64, i64), f64)> = None;
    for p in 0..=coeff_bound {
        for q in -coeff_bound..=coeff_bound {
            for s in -coeff_bound..=coeff_bound {
                // one sign per relation: first nonzero coefficient positive
                let lead = if p != 0 { p } else if q != 0 { q } else { s };
                if lead <= 0 {
                    continue;
                }
                let res = (p as f64 * x + q as f64 * y + s as f64 * zz).abs();
                let size = p.max(q.abs()).max(s.abs());
                if res < tol && best.map_or(true, |b| size < b.0) {
                    best = Some((size, (p, q, s), res));
                }
            }
        }
    }
    let degenerate = x.abs() < tol;
    let (c, d) = if degenerate { (None, None) } else { (Some(2.0 * PI * small_r.ln() / x), Some(2.0 * PI * big_r.ln() / x)) };
    let verdict = match best {
        // a vanishing X is the degeneracy the constants c, d divide by; report it first
        _ if degenerate => Genericity::Resonant { relation: (1, 0, 0), residual: x.abs() },
        Some((_, relation, residual)) => Genericity::Resonant { relation, residual },
        None => Genericity::Generic,
    };
    Ok(GenericityReport { x, y, z: zz, verdict, tol, coeff_bound, c, d })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub m: u32,
    pub n: u32,
    pub value: Complex64,
    pub error: f64,
}

/// `z^m w^n` through logarithms, so large exponents neither overflow nor lose the angle.
pub fn power_product(z: Complex64, w: Complex64, m: u32, n: u32) -> Complex64 {
    let modulus = m as f64 * z.norm().ln() + n as f64 * w.norm().ln();
    let angle = (m as f64 * z.arg()).rem_euclid(2.0 * PI) + (n as f64 * w.arg()).rem_euclid(2.0 * PI);
    Complex64::from_polar(modulus.exp(), angle)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSearch {
    /// Every `(m, n)` with `|z^m w^n - v| < δ`, sorted by `(m, n)`.
    pub pairs: Vec<ExponentPair>,
    /// Smallest error among the modulus-balanced candidates, hit or not.
    pub near_miss: Option<ExponentPair>,
    /// Largest `m` whose modulus window still meets `[1, n_max]`.
    pub m_reach: u32,
}

/// Exponents `n` whose modulus `|z|^m |w|^n` lies in `(|v| - δ, |v| + δ)`.
fn modulus_window(z: Complex64, w: Complex64, v: Complex64, delta: f64, m: u32, n_max: u32) -> std::ops::RangeInclusive<u32> {
    let (lz, lw) = (z.norm().ln(), w.norm().ln());
    let base = m as f64 * lz;
    // lw < 0, so the larger modulus bound gives the smaller n
    let lo = ((v.norm() + delta).ln() - base) / lw;
    let hi = if v.norm() > delta { ((v.norm() - delta).ln() - base) / lw } else { f64::INFINITY };
    let lo = lo.floor().max(1.0);
    let hi = hi.ceil().min(n_max as f64);
    if lo > hi {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    lo as u32..=hi as u32
}

/// All pairs `1 ≤ m ≤ m_max`, `1 ≤ n ≤ n_max` with `|z^m w^n - v| < δ`.
pub fn find_pairs(z: Complex64, w: Complex64, v: Complex64, delta: f64, m_max: u32, n_max: u32) -> Result<PairSearch> {
    check_regime(z, w)?;
    if !(delta > 0.0) || v.norm() == 0.0 || !v.is_finite() {
        return Err(Error::InvalidArgument("need δ > 0 and v ≠ 0".into()));
    }
    let per_m: Vec<(Vec<ExponentPair>, Option<ExponentPair>, bool)> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let mut hits = Vec::new();
            let window = modulus_window(z, w, v, delta, m, n_max);
            let reachable = !window.is_empty();
            for n in window {
                let value = power_product(z, w, m, n);
                let error = (value - v).norm();
                if error < delta {
                    hits.push(ExponentPair { m, n, value, error });
                }
            }
            // modulus-balanced candidate for the near-miss report
            let ideal = (v.norm().ln() - m as f64 * z.norm().ln()) / w.norm().ln();
            let near = [ideal.floor(), ideal.ceil()]
                .into_iter()
                .filter(|n| *n >= 1.0 && *n <= n_max as f64)
                .map(|n| {
                    let value = power_product(z, w, m, n as u32);
                    ExponentPair { m, n: n as u32, value, error: (value - v).norm() }
                })
                .chain(hits.iter().copied())
                .min_by(|p, q| p.error.total_cmp(&q.error));
            (hits, near, reachable)
        })
        .collect();
    let m_reach = per_m.iter().rposition(|r| r.2).map_or(0, |i| i as u32 + 1);
    let mut pairs = Vec::new();
    let mut near_miss: Option<ExponentPair> = None;
    for (hits, near, _) in per_m {
        pairs.extend(hits);
        if let Some(p) = near {
            if near_miss.map_or(true, |b| p.error < b.error) {
                near_miss = Some(p);
            }
        }
    }
    Ok(PairSearch { pairs, near_miss, m_reach })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceGap {
    /// Largest gap between consecutive `m` values that have a pair.
    pub m_gap: u32,
    /// Largest gap between the `n` of consecutive pairs, reported for reference.
    pub n_gap: u32,
    pub pairs_checked: usize,
    pub distinct_m: usize,
    /// Last reachable `m` (see [`PairSearch::m_reach`]) minus the last `m` with a pair.
    pub trailing_gap: u32,
    /// The trailing gap does not exceed `m_gap`.
    pub bounded: bool,
}

pub fn recurrence_gap(z: Complex64, w: Complex64, v: Complex64, delta: f64, m_max: u32, n_max: u32) -> Result<RecurrenceGap> {
    recurrence_gap_of(&find_pairs(z, w, v, delta, m_max, n_max)?)
}

/// Gap statistics of an already computed search.
pub fn recurrence_gap_of(search: &PairSearch) -> Result<RecurrenceGap> {
    let pairs = &search.pairs;
    let mut ms: Vec<u32> = pairs.iter().map(|p| p.m).collect();
    ms.dedup();
    if ms.len() < 3 {
        return Err(Error::InsufficientPairs { found: ms.len(), needed: 3 });
    }
    let m_gap = ms.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    let n_gap = pairs.windows(2).map(|w| w[1].n.abs_diff(w[0].n)).max().unwrap_or(0);
    let trailing_gap = search.m_reach.saturating_sub(ms[ms.len() - 1]);
    Ok(RecurrenceGap {
        m_gap,
        n_gap,
        pairs_checked: pairs.len(),
        distinct_m: ms.len(),
        trailing_gap,
        bounded: trailing_gap <= m_gap,
    })
}

/// CSV with header `m,n,re,im,error`.
pub fn pairs_csv(pairs: &[ExponentPair]) -> String {
    let mut out = String::from("m,n,re,im,error\n");
    for p in pairs {
        let _ = writeln!(out, "{},{},{:e},{:e},{:e}", p.m, p.n, p.value.re, p.value.im, p.error);
    }
    out
}
