//! Local model of a quadratic tangency between unstable and stable leaves.
//!
//! Leaves are graphs over `z` labelled by `w`:
//! `Γᵘ_w(z) = w + φᵘ(z) + κᵘ·w·z² + p(z) + c_tan·μ` and `Γˢ_w(z) = w + φˢ(z) + κˢ·w·z²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::expr::MapExpr;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 60;
const STENCIL_STEP: f64 = 1e-4;

/// A family of graphs `w ↦ (z ↦ w + Σ coeffs[k] z^k + label_quad·w·z²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafFamily {
    pub coeffs: Vec<Complex64>,
    #[serde(default)]
    pub label_quad: Complex64,
}

impl LeafFamily {
    pub fn quadratic(b: Complex64) -> LeafFamily {
        let zero = Complex64::new(0.0, 0.0);
        LeafFamily { coeffs: vec![zero, zero, b], label_quad: zero }
    }

    fn poly(&self) -> MapExpr {
        if self.coeffs.is_empty() {
            MapExpr::Poly { coeffs: vec![Complex64::new(0.0, 0.0)] }
        } else {
            MapExpr::Poly { coeffs: self.coeffs.clone() }
        }
    }

    fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    fn conjugated(&self) -> LeafFamily {
        LeafFamily { coeffs: self.coeffs.iter().map(|c| c.conj()).collect(), label_quad: self.label_quad.conj() }
    }
}

/// `p(z) = a·z²·Π (z - q_i)^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPoly {
    pub a: Complex64,
    pub k: u32,
    pub roots: Vec<Complex64>,
}

impl PerturbationPoly {
    /// Monomial coefficients, lowest degree first.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), self.a];
        for q in &self.roots {
            for _ in 0..self.k {
                // multiply by (z - q)
                let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
                for (i, c) in out.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * q;
                }
                out = next;
            }
        }
        out
    }

    /// `(p(z), p'(z), p''(z))`.
    pub fn jet(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let j = MapExpr::Poly { coeffs: self.coefficients() }.jet(z);
        (j.value, j.d1, j.d2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyChart {
    pub unstable: LeafFamily,
    pub stable: LeafFamily,
    pub c_tan: Complex64,
    /// Already folded into `unstable` by `make_generic_family`; kept for reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationPoly>,
}

impl TangencyChart {
    /// Pure quadratic contact `w + b z² + c μ` against `w`.
    pub fn quadratic(b_tan: Complex64, c_tan: Complex64) -> TangencyChart {
        TangencyChart {
            unstable: LeafFamily::quadratic(b_tan),
            stable: LeafFamily::quadratic(Complex64::new(0.0, 0.0)),
            c_tan,
            perturbation: None,
        }
    }

    /// Half the second derivative at 0 of `l_0 = Γᵘ_0 - Γˢ_0`.
    pub fn b_tan(&self) -> Complex64 {
        self.unstable.coeff(2) - self.stable.coeff(2)
    }

    /// `l_μ(z) = Γᵘ_0(z) - Γˢ_0(z)`.
    pub fn gap(&self, z: Complex64, mu: Complex64) -> Complex64 {
        self.unstable.poly().eval(z) - self.stable.poly().eval(z) + self.c_tan * mu
    }

    pub fn with_perturbation(mut self, p: PerturbationPoly) -> TangencyChart {
        let extra = p.coefficients();
        let len = extra.len().max(self.unstable.coeffs.len());
        self.unstable.coeffs.resize(len, Complex64::new(0.0, 0.0));
        for (c, e) in self.unstable.coeffs.iter_mut().zip(&extra) {
            *c += e;
        }
        self.perturbation = Some(p);
        self
    }

    pub fn conjugated(&self) -> TangencyChart {
        TangencyChart {
            unstable: self.unstable.conjugated(),
            stable: self.stable.conjugated(),
            c_tan: self.c_tan.conj(),
            perturbation: self.perturbation.as_ref().map(|p| PerturbationPoly {
                a: p.a.conj(),
                k: p.k,
                roots: p.roots.iter().map(|q| q.conj()).collect(),
            }),
        }
    }

    /// Label of the unstable leaf through the point `(z, y)`.
    fn unstable_label(&self, z: Complex64, y: Complex64, mu: Complex64) -> Complex64 {
        let phi = self.unstable.poly().eval(z);
        (y - phi - self.c_tan * mu) / (1.0 + self.unstable.label_quad * z * z)
    }

    /// Slope difference of the two leaves through `(z, Γˢ_w(z))`, with the unstable label.
    pub fn slope_gap(&self, z: Complex64, w: Complex64, mu: Complex64) -> (Complex64, Complex64) {
        let ps = self.stable.poly().jet(z);
        let y = w + ps.value + self.stable.label_quad * w * z * z;
        let wu = self.unstable_label(z, y, mu);
        let pu = self.unstable.poly().jet(z);
        let slope_u = pu.d1 + 2.0 * self.unstable.label_quad * wu * z;
        let slope_s = ps.d1 + 2.0 * self.stable.label_quad * w * z;
        (slope_u - slope_s, wu)
    }

    /// Second derivative of `Γᵘ_{wu} - Γˢ_w` in `z`.
    pub fn second_derivative_gap(&self, z: Complex64, w: Complex64, wu: Complex64) -> Complex64 {
        let pu = self.unstable.poly().jet(z);
        let ps = self.stable.poly().jet(z);
        pu.d2 + 2.0 * self.unstable.label_quad * wu - ps.d2 - 2.0 * self.stable.label_quad * w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyPoint {
    pub w: Complex64,
    /// `α(w)`; NaN when Newton failed.
    pub z: Complex64,
    pub residual: f64,
    pub second_derivative_gap: Complex64,
    pub iterations: usize,
    pub converged: bool,
}

/// `side × side` grid over the square circumscribing the window.
pub fn window_grid(window: &Disk, side: usize) -> Vec<Complex64> {
    let step = |i: usize| if side == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (side - 1) as f64 };
    let mut out = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            out.push(window.center + window.radius * Complex64::new(step(i), step(j)));
        }
    }
    out
}

fn holomorphic_derivative(f: impl Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
    let h = STENCIL_STEP * (1.0 + z.norm());
    let i = Complex64::i();
    (f(z + h) - f(z - h) - i * (f(z + i * h) - f(z - i * h))) / (4.0 * h)
}

/// Newton solve of the slope difference for `z` at every `w` of the grid.
pub fn tangency_disk(chart: &TangencyChart, mu: Complex64, ws: &[Complex64]) -> Vec<TangencyPoint> {
    let mut guess = Complex64::new(0.0, 0.0);
    ws.iter()
        .map(|&w| {
            let f = |z: Complex64| chart.slope_gap(z, w, mu).0;
            let mut z = guess;
            let mut iterations = 0;
            let mut converged = false;
            while iterations < NEWTON_MAX_ITER {
                let fz = f(z);
                if fz.norm() <= NEWTON_TOL {
                    converged = true;
                    break;
                }
                let d = holomorphic_derivative(f, z);
                if d.norm() == 0.0 || !d.is_finite() {
                    break;
                }
                let step = fz / d;
                z -= step;
                iterations += 1;
                if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                    converged = f(z).norm() < 1e-10;
                    break;
                }
            }
            let (res, wu) = chart.slope_gap(z, w, mu);
            if converged && res.is_finite() {
                guess = z;
                TangencyPoint {
                    w,
                    z,
                    residual: res.norm(),
                    second_derivative_gap: chart.second_derivative_gap(z, w, wu),
                    iterations,
                    converged,
                }
            } else {
                let nan = Complex64::new(f64::NAN, f64::NAN);
                TangencyPoint { w, z: nan, residual: f64::NAN, second_derivative_gap: nan, iterations, converged: false }
            }
        })
        .collect()
}

/// Points where Newton failed, as an error listing their labels.
pub fn require_converged(points: &[TangencyPoint]) -> Result<()> {
    let bad: Vec<String> = points.iter().filter(|p| !p.converged).map(|p| p.w.to_string()).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Newton diverged at w = {}", bad.join(", "))))
    }
}
