//! Holomorphic map expressions.
//!
//! A [`MapExpr`] is a small expression tree of conformal maps of the plane:
//! affine maps, polynomials, Möbius maps, chains of these and Newton-backed
//! local inverses. Every node evaluates its value together with its first and
//! second derivatives, and bounds `|f'|` from above and below on a disk.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::disk::Disk;
use crate::error::{Error, Result};

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_STEP_TOL: f64 = 1e-15;
/// Inflation applied to derivative enclosures to absorb rounding.
const ENCLOSURE_INFLATE: f64 = 1e-12;

/// Value and first two derivatives of a holomorphic map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    fn nan() -> Jet {
        let n = Complex64::new(f64::NAN, f64::NAN);
        Jet { value: n, d1: n, d2: n }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MapExpr {
    /// `z ↦ scale·z + offset`
    Affine { scale: Complex64, offset: Complex64 },
    /// `z ↦ Σ coeffs[k]·z^k`
    Poly { coeffs: Vec<Complex64> },
    /// `z ↦ (a z + b) / (c z + d)`
    Mobius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// Maps applied left to right: `maps[0]` first.
    Chain { maps: Vec<MapExpr> },
    /// Local inverse of `forward` with values in the disk `D(center, radius)`.
    Inverse { forward: Box<MapExpr>, center: Complex64, radius: f64 },
    /// `z ↦ scale·(inner(z) - inner(base)) + offset`, evaluated through differences so that
    /// strongly contracting `inner` maps keep their relative precision.
    Rebased { inner: Box<MapExpr>, base: Complex64, scale: Complex64, offset: Complex64 },
}

impl MapExpr {
    pub fn identity() -> MapExpr {
        MapExpr::affine(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn affine(scale: Complex64, offset: Complex64) -> MapExpr {
        MapExpr::Affine { scale, offset }
    }

    pub fn poly(coeffs: Vec<Complex64>) -> MapExpr {
        MapExpr::Poly { coeffs }
    }

    /// `self` followed by `next`.
    pub fn then(self, next: MapExpr) -> MapExpr {
        let mut maps = match self {
            MapExpr::Chain { maps } => maps,
            other => vec![other],
        };
        match next {
            MapExpr::Chain { maps: more } => maps.extend(more),
            other => maps.push(other),
        }
        MapExpr::Chain { maps }
    }

    /// Structural sanity: nonzero scales, nondegenerate Möbius maps, nonempty polynomials.
    pub fn check(&self) -> Result<()> {
        match self {
            MapExpr::Affine { scale, offset } => {
                if !scale.is_finite() || !offset.is_finite() || scale.norm() == 0.0 {
                    return Err(Error::MalformedExpr(format!("affine scale {scale}")));
                }
            }
            MapExpr::Poly { coeffs } => {
                if coeffs.len() < 2 || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::MalformedExpr("polynomial needs degree >= 1".into()));
                }
                if coeffs.iter().skip(1).all(|c| c.norm() == 0.0) {
                    return Err(Error::MalformedExpr("constant polynomial".into()));
                }
            }
            MapExpr::Mobius { a, b, c, d } => {
                if (a * d - b * c).norm() == 0.0 {
                    return Err(Error::MalformedExpr("degenerate Möbius map".into()));
                }
            }
            MapExpr::Chain { maps } => {
                if maps.is_empty() {
                    return Err(Error::MalformedExpr("empty chain".into()));
                }
                for m in maps {
                    m.check()?;
                }
            }
            MapExpr::Inverse { forward, radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::MalformedExpr("inverse needs a positive radius".into()));
                }
                forward.check()?;
            }
            MapExpr::Rebased { inner, scale, offset, base } => {
                if !scale.is_finite() || scale.norm() == 0.0 || !offset.is_finite() || !base.is_finite() {
                    return Err(Error::MalformedExpr(format!("rebased scale {scale}")));
                }
                inner.check()?;
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            MapExpr::Affine { scale, offset } => scale * z + offset,
            MapExpr::Poly { coeffs } => coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
            MapExpr::Mobius { a, b, c, d } => (a * z + b) / (c * z + d),
            MapExpr::Chain { maps } => maps.iter().fold(z, |w, m| m.eval(w)),
            MapExpr::Inverse { forward, center, .. } => newton_inverse(forward, *center, z).value,
            MapExpr::Rebased { inner, base, scale, offset } => scale * inner.eval_delta(*base, z - base) + offset,
        }
    }

    /// `f(x + dx) - f(x)`, accurate relative to `|dx|` rather than to `|f(x)|`.
    pub fn eval_delta(&self, x: Complex64, dx: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if dx == zero {
            return zero;
        }
        match self {
            MapExpr::Affine { scale, .. } => scale * dx,
            MapExpr::Poly { coeffs } => {
                let t = taylor_shift(coeffs, x);
                t.iter().skip(1).rev().fold(zero, |acc, c| acc * dx + c) * dx
            }
            MapExpr::Mobius { a, b, c, d } => (a * d - b * c) * dx / ((c * x + d) * (c * (x + dx) + d)),
            MapExpr::Chain { maps } => {
                let (mut p, mut q) = (x, dx);
                for m in maps {
                    let next = m.eval(p);
                    q = m.eval_delta(p, q);
                    p = next;
                }
                q
            }
            MapExpr::Inverse { forward, center, .. } => {
                let y = newton_inverse(forward, *center, x).value;
                if !y.is_finite() {
                    return Complex64::new(f64::NAN, f64::NAN);
                }
                // solve forward(y + e) - forward(y) = dx for e
                let mut e = dx / forward.deriv(y);
                for _ in 0..NEWTON_MAX_ITER {
                    let step = (forward.eval_delta(y, e) - dx) / forward.deriv(y + e);
                    e -= step;
                    if !(step.norm() > NEWTON_STEP_TOL * e.norm()) {
                        break;
                    }
                }
                e
            }
            MapExpr::Rebased { inner, scale, .. } => scale * inner.eval_delta(x, dx),
        }
    }

    pub fn jet(&self, z: Complex64) -> Jet {
        match self {
            MapExpr::Affine { scale, offset } => Jet { value: scale * z + offset, d1: *scale, d2: Complex64::new(0.0, 0.0) },
            MapExpr::Poly { coeffs } => poly_jet(coeffs, z),
            MapExpr::Mobius { a, b, c, d } => {
                let den = c * z + d;
                let det = a * d - b * c;
                Jet {
                    value: (a * z + b) / den,
                    d1: det / (den * den),
                    d2: -2.0 * det * c / (den * den * den),
                }
            }
            MapExpr::Chain { maps } => {
                let mut acc = Jet { value: z, d1: Complex64::new(1.0, 0.0), d2: Complex64::new(0.0, 0.0) };
                for m in maps {
                    let j = m.jet(acc.value);
                    acc = Jet {
                        value: j.value,
                        d1: j.d1 * acc.d1,
                        d2: j.d2 * acc.d1 * acc.d1 + j.d1 * acc.d2,
                    };
                }
                acc
            }
            MapExpr::Inverse { forward, center, .. } => newton_inverse(forward, *center, z),
            MapExpr::Rebased { inner, scale, .. } => {
                let j = inner.jet(z);
                Jet { value: self.eval(z), d1: scale * j.d1, d2: scale * j.d2 }
            }
        }
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.jet(z).d1
    }

    /// Bounds `(inf, sup)` of `|f'|` over the disk.
    pub fn deriv_bounds(&self, d: &Disk) -> (f64, f64) {
        let (lo, hi) = self.deriv_bounds_raw(d);
        (lo * (1.0 - ENCLOSURE_INFLATE), hi * (1.0 + ENCLOSURE_INFLATE))
    }

    fn deriv_bounds_raw(&self, d: &Disk) -> (f64, f64) {
        match self {
            MapExpr::Affine { scale, .. } => (scale.norm(), scale.norm()),
            MapExpr::Poly { coeffs } => {
                let t = taylor_shift(coeffs, d.center);
                let lead = t.get(1).map(|c| c.norm()).unwrap_or(0.0);
                let mut rest = 0.0;
                let mut rp = 1.0;
                for (k, c) in t.iter().enumerate().skip(2) {
                    rp *= d.radius;
                    rest += k as f64 * c.norm() * rp;
                }
                ((lead - rest).max(0.0), lead + rest)
            }
            MapExpr::Mobius { a, b, c, d: dd } => {
                let det = (a * dd - b * c).norm();
                let mid = (c * d.center + dd).norm();
                let spread = c.norm() * d.radius;
                let lo_den = (mid - spread).max(0.0);
                let hi_den = mid + spread;
                let hi = if lo_den > 0.0 { det / (lo_den * lo_den) } else { f64::INFINITY };
                (det / (hi_den * hi_den), hi)
            }
            MapExpr::Chain { maps } => {
                let mut cur = *d;
                let (mut lo, mut hi) = (1.0, 1.0);
                for m in maps {
                    let (l, h) = m.deriv_bounds(&cur);
                    lo *= l;
                    hi *= h;
                    cur = Disk::new(m.eval(cur.center), h * cur.radius);
                }
                (lo, hi)
            }
            MapExpr::Inverse { forward, center, radius } => {
                // f(d) lies in the target piece; refine the enclosure of f(d) a few times.
                let fc = self.eval(d.center);
                if !fc.is_finite() {
                    return (0.0, f64::INFINITY);
                }
                let mut region = Disk::new(*center, *radius);
                let mut bounds = (0.0, f64::INFINITY);
                for _ in 0..4 {
                    let (glo, ghi) = forward.deriv_bounds(&region);
                    if glo <= 0.0 {
                        break;
                    }
                    bounds = (1.0 / ghi, 1.0 / glo);
                    let next = Disk::new(fc, d.radius * bounds.1);
                    if next.radius >= region.radius {
                        break;
                    }
                    region = next;
                }
                bounds
            }
            MapExpr::Rebased { inner, scale, .. } => {
                let (lo, hi) = inner.deriv_bounds_raw(d);
                (scale.norm() * lo, scale.norm() * hi)
            }
        }
    }

    /// A disk containing `f(d)`: `D(f(c), sup|f'|·r)`.
    pub fn image_enclosure(&self, d: &Disk) -> Disk {
        let (_, hi) = self.deriv_bounds(d);
        Disk::new(self.eval(d.center), hi * d.radius)
    }

    /// The affine map this expression reduces to, if any.
    pub fn as_affine(&self) -> Option<(Complex64, Complex64)> {
        match self {
            MapExpr::Affine { scale, offset } => Some((*scale, *offset)),
            MapExpr::Poly { coeffs } => {
                if coeffs.iter().skip(2).all(|c| c.norm() == 0.0) {
                    Some((coeffs[1], coeffs[0]))
                } else {
                    None
                }
            }
            MapExpr::Mobius { a, b, c, d } => {
                if c.norm() == 0.0 {
                    Some((a / d, b / d))
                } else {
                    None
                }
            }
            MapExpr::Chain { maps } => {
                let mut s = Complex64::new(1.0, 0.0);
                let mut o = Complex64::new(0.0, 0.0);
                for m in maps {
                    let (ms, mo) = m.as_affine()?;
                    s = ms * s;
                    o = ms * o + mo;
                }
                Some((s, o))
            }
            MapExpr::Inverse { forward, .. } => {
                let (s, o) = forward.as_affine()?;
                Some((1.0 / s, -o / s))
            }
            MapExpr::Rebased { inner, base, scale, offset } => {
                let (s, _) = inner.as_affine()?;
                Some((scale * s, offset - scale * s * base))
            }
        }
    }

    /// Local inverse taking values in `target`. Affine and Möbius maps invert exactly.
    pub fn inverse_into(&self, target: &Disk) -> MapExpr {
        if let Some((s, o)) = self.as_affine() {
            return MapExpr::affine(1.0 / s, -o / s);
        }
        match self {
            MapExpr::Mobius { a, b, c, d } => MapExpr::Mobius { a: *d, b: -b, c: -c, d: *a },
            _ => MapExpr::Inverse { forward: Box::new(self.clone()), center: target.center, radius: target.radius },
        }
    }

    /// Add an independent uniform sample from the `eps`-disk to every coefficient.
    pub fn perturbed<R: Rng>(&self, rng: &mut R, eps: f64) -> MapExpr {
        if eps == 0.0 {
            return self.clone();
        }
        let mut jitter = |c: Complex64| c + uniform_in_disk(rng, eps);
        match self {
            MapExpr::Affine { scale, offset } => MapExpr::Affine { scale: jitter(*scale), offset: jitter(*offset) },
            MapExpr::Poly { coeffs } => MapExpr::Poly { coeffs: coeffs.iter().map(|c| jitter(*c)).collect() },
            MapExpr::Mobius { a, b, c, d } => MapExpr::Mobius { a: jitter(*a), b: jitter(*b), c: jitter(*c), d: jitter(*d) },
            MapExpr::Chain { maps } => MapExpr::Chain { maps: maps.iter().map(|m| m.perturbed(rng, eps)).collect() },
            MapExpr::Inverse { forward, center, radius } => MapExpr::Inverse {
                forward: Box::new(forward.perturbed(rng, eps)),
                center: *center,
                radius: *radius,
            },
            MapExpr::Rebased { inner, base, scale, offset } => MapExpr::Rebased {
                inner: Box::new(inner.perturbed(rng, eps)),
                base: *base,
                scale: *scale,
                offset: *offset,
            },
        }
    }

    /// Complex conjugate map `z ↦ conj(f(conj z))`.
    pub fn conjugated(&self) -> MapExpr {
        match self {
            MapExpr::Affine { scale, offset } => MapExpr::Affine { scale: scale.conj(), offset: offset.conj() },
            MapExpr::Poly { coeffs } => MapExpr::Poly { coeffs: coeffs.iter().map(|c| c.conj()).collect() },
            MapExpr::Mobius { a, b, c, d } => MapExpr::Mobius { a: a.conj(), b: b.conj(), c: c.conj(), d: d.conj() },
            MapExpr::Chain { maps } => MapExpr::Chain { maps: maps.iter().map(|m| m.conjugated()).collect() },
            MapExpr::Inverse { forward, center, radius } => MapExpr::Inverse {
                forward: Box::new(forward.conjugated()),
                center: center.conj(),
                radius: *radius,
            },
            MapExpr::Rebased { inner, base, scale, offset } => MapExpr::Rebased {
                inner: Box::new(inner.conjugated()),
                base: base.conj(),
                scale: scale.conj(),
                offset: offset.conj(),
            },
        }
    }
}

/// Uniform sample from the closed disk of radius `eps` around 0.
pub fn uniform_in_disk<R: Rng>(rng: &mut R, eps: f64) -> Complex64 {
    let r = eps * rng.gen::<f64>().sqrt();
    let t = std::f64::consts::TAU * rng.gen::<f64>();
    Complex64::from_polar(r, t)
}

fn poly_jet(coeffs: &[Complex64], z: Complex64) -> Jet {
    let zero = Complex64::new(0.0, 0.0);
    let (mut p, mut dp, mut ddp) = (zero, zero, zero);
    for c in coeffs.iter().rev() {
        ddp = ddp * z + 2.0 * dp;
        dp = dp * z + p;
        p = p * z + c;
    }
    Jet { value: p, d1: dp, d2: ddp }
}

/// Coefficients of `t ↦ p(c + t)`.
fn taylor_shift(coeffs: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut t = coeffs.to_vec();
    let n = t.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = t[j + 1];
            t[j] += c * next;
        }
    }
    t
}

fn newton_inverse(forward: &MapExpr, center: Complex64, z: Complex64) -> Jet {
    let j0 = forward.jet(center);
    if !j0.is_finite() || j0.d1.norm() == 0.0 {
        return Jet::nan();
    }
    let mut x = center + (z - j0.value) / j0.d1;
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let j = forward.jet(x);
        if !j.is_finite() || j.d1.norm() == 0.0 {
            return Jet::nan();
        }
        let mut step = (j.value - z) / j.d1;
        // damp steps that increase the residual
        let res = (j.value - z).norm();
        let mut tries = 0;
        while tries < 20 && (forward.eval(x - step) - z).norm() > res && res > 0.0 {
            step *= 0.5;
            tries += 1;
        }
        x -= step;
        if step.norm() <= NEWTON_STEP_TOL * (1.0 + x.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Jet::nan();
    }
    let j = forward.jet(x);
    let d1 = 1.0 / j.d1;
    Jet { value: x, d1, d2: -j.d2 * d1 * d1 * d1 }
}
