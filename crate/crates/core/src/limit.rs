//! Configurations, the renormalization operator and limit geometries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::expr::MapExpr;
use crate::system::{CantorSystem, Letter};
use crate::word::{TailSequence, Word};

/// Side of the evaluation grid used for sup-norms.
pub const GRID_SIDE: usize = 33;
/// Deepest renormalization tried before giving up.
pub const DEFAULT_MAX_DEPTH: usize = 40;

/// `z ↦ scale·z + offset` with `scale ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMapC {
    pub scale: Complex64,
    pub offset: Complex64,
}

impl AffineMapC {
    pub fn new(scale: Complex64, offset: Complex64) -> Result<AffineMapC> {
        if scale.norm() == 0.0 || !scale.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidArgument(format!("affine scale {scale} must be finite and nonzero")));
        }
        Ok(AffineMapC { scale, offset })
    }

    pub fn identity() -> AffineMapC {
        AffineMapC { scale: Complex64::new(1.0, 0.0), offset: Complex64::new(0.0, 0.0) }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.scale * z + self.offset
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMapC) -> AffineMapC {
        AffineMapC { scale: self.scale * inner.scale, offset: self.scale * inner.offset + self.offset }
    }

    pub fn inverse(&self) -> AffineMapC {
        let s = 1.0 / self.scale;
        AffineMapC { scale: s, offset: -self.offset * s }
    }

    pub fn to_expr(&self) -> MapExpr {
        MapExpr::affine(self.scale, self.offset)
    }

    pub fn from_expr(map: &MapExpr) -> Option<AffineMapC> {
        map.as_affine().and_then(|(s, o)| AffineMapC::new(s, o).ok())
    }
}

/// `inner` followed by `outer`, collapsed to a single affine node when both are affine.
pub fn compose_exprs(inner: MapExpr, outer: MapExpr) -> MapExpr {
    match (AffineMapC::from_expr(&inner), AffineMapC::from_expr(&outer)) {
        (Some(i), Some(o)) => o.compose(&i).to_expr(),
        (None, Some(o)) => match inner {
            MapExpr::Rebased { inner, base, scale, offset } => {
                MapExpr::Rebased { inner, base, scale: o.scale * scale, offset: o.apply(offset) }
            }
            other => other.then(outer),
        },
        _ => inner.then(outer),
    }
}

/// A conformal embedding of the piece `G(letter)` into the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub letter: Letter,
    pub map: MapExpr,
}

impl Configuration {
    pub fn new(letter: Letter, map: MapExpr) -> Configuration {
        Configuration { letter, map }
    }

    pub fn identity(letter: Letter) -> Configuration {
        Configuration::new(letter, MapExpr::identity())
    }

    pub fn affine(letter: Letter, a: AffineMapC) -> Configuration {
        Configuration::new(letter, a.to_expr())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.map.eval(z)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.map.deriv(z)
    }

    pub fn as_affine(&self) -> Option<AffineMapC> {
        AffineMapC::from_expr(&self.map)
    }

    /// Grid check of injectivity and a nonvanishing derivative on `G(letter)`.
    pub fn check(&self, sys: &CantorSystem) -> Result<()> {
        self.map.check()?;
        let piece = sys.piece(self.letter);
        let pts = piece.grid(17);
        let images: Vec<Complex64> = pts.iter().map(|&z| self.eval(z)).collect();
        for (z, w) in pts.iter().zip(&images) {
            let d = self.deriv(*z);
            if !w.is_finite() || !d.is_finite() || d.norm() == 0.0 {
                return Err(Error::VanishingDerivative(format!("configuration at {z}")));
            }
        }
        let step = 2.0 * piece.radius / 16.0;
        let scale = self.deriv(piece.center).norm();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if (images[i] - images[j]).norm() <= 1e-12 * step * scale {
                    return Err(Error::InvalidArgument(format!(
                        "configuration is not injective: {} and {} collide",
                        pts[i], pts[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `T_word(h) = h ∘ f_word`: a configuration of `G(word.first())` becomes one of `G(word.last())`.
pub fn renormalize(sys: &CantorSystem, h: &Configuration, word: &Word) -> Result<Configuration> {
    if h.letter != word.first() {
        return Err(Error::DomainMismatch {
            expected: sys.name(word.first()).to_string(),
            found: sys.name(h.letter).to_string(),
        });
    }
    let f = sys.compose_branches(word)?;
    Ok(Configuration::new(word.last(), compose_exprs(f, h.map.clone())))
}

/// The affine `A` with `(A∘h)(base) = 0` and `(A∘h)'(base) = 1`, and the normalized `A∘h`.
pub fn normalize_affine(h: &Configuration, base: Complex64) -> Result<(AffineMapC, Configuration)> {
    let jet = h.map.jet(base);
    if !jet.is_finite() || jet.d1.norm() == 0.0 {
        return Err(Error::VanishingDerivative(format!("{base}")));
    }
    let s = 1.0 / jet.d1;
    let a = AffineMapC::new(s, -jet.value * s)?;
    if a == AffineMapC::identity() {
        return Ok((a, h.clone()));
    }
    if h.as_affine().is_some() {
        // an affine map normalized at `base` is exactly the translation by `-base`
        let exact = AffineMapC { scale: Complex64::new(1.0, 0.0), offset: -base };
        return Ok((a, Configuration::affine(h.letter, exact)));
    }
    let map = MapExpr::Rebased { inner: Box::new(h.map.clone()), base, scale: s, offset: Complex64::new(0.0, 0.0) };
    Ok((a, Configuration::new(h.letter, map)))
}

/// Sup of `|f - g|` over the sample points.
pub fn sup_distance(pts: &[Complex64], f: impl Fn(Complex64) -> Complex64, g: impl Fn(Complex64) -> Complex64) -> f64 {
    pts.iter().map(|&z| (f(z) - g(z)).norm()).fold(0.0, f64::max)
}

/// The fixed evaluation grid of a piece.
pub fn evaluation_grid(piece: &Disk) -> Vec<Complex64> {
    piece.grid(GRID_SIDE)
}

/// Least-squares fit `values[i] ≈ C·η^depths[i]` on the positive entries; returns `(C, η)`.
pub fn fit_geometric(depths: &[usize], values: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        depths.iter().zip(values).filter(|(_, v)| **v > 0.0).map(|(&n, &v)| (n as f64, v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), slope.exp()))
}

/// A truncated limit geometry `k_n = Φ ∘ f_{θ_n}` on `G(θ_0)`.
#[derive(Debug, Clone)]
pub struct LimitGeometryApprox {
    pub tail: TailSequence,
    pub depth: usize,
    /// The full map `Φ ∘ f_{θ_n}`.
    pub composed: MapExpr,
    pub normalizer: AffineMapC,
    pub error_bound: f64,
    pub letter: Letter,
    pub base: Complex64,
    /// Sup distances between consecutive truncations, `diffs[i]` at depth `i + 1`.
    pub diffs: Vec<f64>,
    /// Measured contraction ratio used for the tail bound.
    pub ratio: f64,
}

impl LimitGeometryApprox {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.composed.eval(z)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.composed.deriv(z)
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::new(self.letter, self.composed.clone())
    }

    /// `(C, η)` fitted to the successive differences.
    pub fn fitted_rate(&self) -> Option<(f64, f64)> {
        let depths: Vec<usize> = (1..=self.diffs.len()).collect();
        fit_geometric(&depths, &self.diffs)
    }

    pub fn export(&self, sys: &CantorSystem) -> LimitGeometryExport {
        let name = |a: &Letter| sys.name(*a).to_string();
        let grid = evaluation_grid(&sys.piece(self.letter));
        LimitGeometryExport {
            block: self.tail.block.iter().map(name).collect(),
            suffix: self.tail.suffix.iter().map(name).collect(),
            letter: name(&self.letter),
            base: self.base,
            depth: self.depth,
            error_bound: self.error_bound,
            ratio: self.ratio,
            fitted_eta: self.fitted_rate().map(|r| r.1),
            diffs: self.diffs.clone(),
            normalizer: self.normalizer,
            samples: grid.iter().map(|&z| (z, self.eval(z))).collect(),
        }
    }
}

/// Plot-ready JSON form of a [`LimitGeometryApprox`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitGeometryExport {
    pub block: Vec<String>,
    pub suffix: Vec<String>,
    pub letter: String,
    pub base: Complex64,
    pub depth: usize,
    pub error_bound: f64,
    pub ratio: f64,
    pub fitted_eta: Option<f64>,
    pub diffs: Vec<f64>,
    pub normalizer: AffineMapC,
    /// `(z, k(z))` on the evaluation grid.
    pub samples: Vec<(Complex64, Complex64)>,
}

/// Normalized `h ∘ f_{θ_n}` at `c_{θ_0}`, for `h` defined on `G(θ_{-n})`.
pub fn normalized_truncation(sys: &CantorSystem, tail: &TailSequence, h: &MapExpr, n: usize) -> Result<(AffineMapC, Configuration)> {
    let word = sys.word(tail.expand(n))?;
    let h = Configuration::new(word.first(), h.clone());
    let r = renormalize(sys, &h, &word)?;
    normalize_affine(&r, sys.base_point(tail.last()))
}

/// Sup distances between normalized `T_{θ_n}(h)` and `T_{θ_{n-1}}(h)` for each `n` in `depths`.
pub fn successive_distances(
    sys: &CantorSystem,
    tail: &TailSequence,
    h: &MapExpr,
    depths: impl IntoIterator<Item = usize>,
) -> Result<Vec<f64>> {
    let grid = evaluation_grid(&sys.piece(tail.last()));
    depths
        .into_iter()
        .map(|n| {
            if n == 0 {
                return Err(Error::InvalidArgument("depth must be at least 1".into()));
            }
            let (_, cur) = normalized_truncation(sys, tail, h, n)?;
            let (_, prev) = normalized_truncation(sys, tail, h, n - 1)?;
            Ok(sup_distance(&grid, |z| cur.eval(z), |z| prev.eval(z)))
        })
        .collect()
}

/// Limit geometry along `tail` to sup tolerance `tol`, searching depths up to `max_depth`.
///
/// The depth is the first `n` whose successive difference is below `tol` with a measured
/// ratio below one; the bound on the remaining tail is `diff_n / (1 - ρ̂)`.
pub fn limit_geometry_with(sys: &CantorSystem, tail: &TailSequence, tol: f64, max_depth: usize) -> Result<LimitGeometryApprox> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let letter = tail.last();
    let base = sys.base_point(letter);
    let grid = evaluation_grid(&sys.piece(letter));
    let identity = MapExpr::identity();
    let (_, mut prev) = normalized_truncation(sys, tail, &identity, 0)?;
    let mut diffs = Vec::new();
    for n in 1..=max_depth {
        let (phi, cur) = normalized_truncation(sys, tail, &identity, n)?;
        let diff = sup_distance(&grid, |z| cur.eval(z), |z| prev.eval(z));
        diffs.push(diff);
        let ratio = match diffs.len() {
            _ if diff == 0.0 => 0.0,
            1 => f64::INFINITY,
            k => {
                let r1 = diffs[k - 1] / diffs[k - 2];
                if k >= 3 {
                    r1.max(diffs[k - 2] / diffs[k - 3])
                } else {
                    r1
                }
            }
        };
        if diff < tol && ratio < 1.0 {
            return Ok(LimitGeometryApprox {
                tail: tail.clone(),
                depth: n,
                composed: cur.map,
                normalizer: phi,
                error_bound: diff / (1.0 - ratio),
                letter,
                base,
                diffs,
                ratio,
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence { max_depth, diffs })
}

pub fn limit_geometry(sys: &CantorSystem, tail: &TailSequence, tol: f64) -> Result<LimitGeometryApprox> {
    limit_geometry_with(sys, tail, tol, DEFAULT_MAX_DEPTH)
}

/// The affine `F` with `k^θ ∘ f_{θ_0 θ_1} = F ∘ k^{θθ_1}`, using both normalizations.
pub fn affine_transfer(sys: &CantorSystem, tail: &TailSequence, next: Letter, tol: f64) -> Result<AffineMapC> {
    let k = limit_geometry(sys, tail, tol)?;
    affine_transfer_from(sys, &k, next)
}

/// [`affine_transfer`] reusing an already computed `k^θ`.
pub fn affine_transfer_from(sys: &CantorSystem, k: &LimitGeometryApprox, next: Letter) -> Result<AffineMapC> {
    let f = sys.inverse_branch(k.letter, next)?;
    let c1 = sys.base_point(next);
    let fj = f.jet(c1);
    let kj = k.composed.jet(fj.value);
    AffineMapC::new(kj.d1 * fj.d1, kj.value)
}
