//! Model unfolding of a quadratic tangency between two conformal Cantor sets.
//!
//! The unstable set `Kᵘ` and the stable set `Kˢ` are placed near the tangency point by
//! configurations `hᵘ_μ = hᵘ_0 + cᵘ(μ)` and `hˢ_μ = hˢ_0`, with `cᵘ(μ) = B·μ + r(μ)`.
//! The fixed points `pᵘ`, `pˢ` of the letters `θᵘ`, `θˢ` play the role of the saddle; their
//! multipliers are `λᵘ` and `1/λˢ`.

pub mod scan;
pub mod tangency;

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::expr::MapExpr;
use crate::intersect::ConfiguredSet;
use crate::kronecker::{genericity_check, GenericityReport, DEFAULT_COEFF_BOUND, DEFAULT_TOL};
use crate::limit::{compose_exprs, renormalize, AffineMapC, Configuration};
use crate::system::{CantorSystem, Letter, SystemDoc};
use crate::word::Word;

pub use scan::{density_ladder, density_lower_bound, depth_for_scale, scan_tangency_set, DensityBound, DensityEstimate, ScanRow};
pub use tangency::{tangency_disk, window_grid, LeafFamily, PerturbationPoly, TangencyChart, TangencyPoint};

const MODEL_TOL: f64 = 1e-9;

/// A real-linear map of `ℂ = ℝ²`, rows acting on `(re, im)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealLinear(pub [[f64; 2]; 2]);

impl RealLinear {
    pub fn identity() -> RealLinear {
        RealLinear([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Multiplication by a complex number.
    pub fn complex(c: Complex64) -> RealLinear {
        RealLinear([[c.re, -c.im], [c.im, c.re]])
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let m = &self.0;
        Complex64::new(m[0][0] * z.re + m[0][1] * z.im, m[1][0] * z.re + m[1][1] * z.im)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &RealLinear) -> RealLinear {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        RealLinear(out)
    }

    pub fn inverse(&self) -> Result<RealLinear> {
        let d = self.det();
        if !(d.abs() > 1e-300) || !d.is_finite() {
            return Err(Error::Singular(d));
        }
        let m = &self.0;
        Ok(RealLinear([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    /// Singular values `(σ_min, σ_max)`.
    pub fn singular_values(&self) -> (f64, f64) {
        let m = &self.0;
        let fro2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
        let d = self.det().abs();
        let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
        let smax = ((fro2 + disc) / 2.0).sqrt();
        let smin = if smax > 0.0 { d / smax } else { 0.0 };
        (smin, smax)
    }

    /// `J∘self∘J` with `J` the complex conjugation.
    pub fn mirrored(&self) -> RealLinear {
        let m = &self.0;
        RealLinear([[m[0][0], -m[0][1]], [-m[1][0], m[1][1]]])
    }
}

/// How the target `ζ` of the density argument is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ZetaMode {
    /// Resonant branch when the eigenvalues are resonant, otherwise `ζ = 1`.
    Auto,
    Generic { zeta: Complex64 },
    /// `ζ = D((hᵘ)⁻¹∘hˢ)(0)`, target `v = 1`.
    Resonant,
}

#[derive(Debug, Clone)]
pub struct UnfoldingModel {
    pub lambda_u: Complex64,
    pub lambda_s: Complex64,
    pub b: RealLinear,
    /// Drift `λᵘ(μ) = λᵘ·(1 + κᵘ μ)`.
    pub kappa_u: Complex64,
    /// Drift `λˢ(μ) = λˢ·(1 + κˢ μ)`.
    pub kappa_s: Complex64,
    /// `r(μ) = r_coef·μ²`.
    pub r_coef: Complex64,
    /// `cᵘ(0)`; nonzero values describe families without a tangency.
    pub cu_offset: Complex64,
    pub ku: CantorSystem,
    pub ks: CantorSystem,
    pub theta_u: Letter,
    pub theta_s: Letter,
    pub hu0: MapExpr,
    pub hs0: MapExpr,
    pub chart: TangencyChart,
    pub zeta: ZetaMode,
    pub validity_radius: f64,
}

/// Inputs of [`make_generic_family`]; the defaults give the middle-thirds family.
#[derive(Debug, Clone)]
pub struct FamilyParams {
    pub lambda_u: Complex64,
    pub lambda_s: Complex64,
    pub b: RealLinear,
    pub kappa_u: Complex64,
    pub kappa_s: Complex64,
    pub r_coef: Complex64,
    pub cu_offset: Complex64,
    pub ku: CantorSystem,
    pub ks: CantorSystem,
    pub theta_u: Letter,
    pub theta_s: Letter,
    pub hu0: MapExpr,
    pub hs0: MapExpr,
    pub chart: TangencyChart,
    pub perturbation: Option<PerturbationPoly>,
    pub zeta: ZetaMode,
    pub validity_radius: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Default for FamilyParams {
    fn default() -> FamilyParams {
        FamilyParams {
            lambda_u: c(3.0, 0.0),
            lambda_s: c(1.0 / 3.0, 0.0),
            b: RealLinear::identity(),
            kappa_u: c(0.0, 0.0),
            kappa_s: c(0.0, 0.0),
            r_coef: c(0.0, 0.0),
            cu_offset: c(0.0, 0.0),
            ku: catalog::middle_thirds(),
            ks: catalog::middle_thirds(),
            theta_u: Letter(0),
            theta_s: Letter(0),
            hu0: MapExpr::identity(),
            hs0: MapExpr::identity(),
            chart: TangencyChart::quadratic(c(1.0, 0.0), c(1.0, 0.0)),
            perturbation: None,
            zeta: ZetaMode::Auto,
            validity_radius: 0.5,
        }
    }
}

/// Builds and validates a model, folding the perturbation polynomial into the unstable leaves.
pub fn make_generic_family(params: FamilyParams) -> Result<UnfoldingModel> {
    let chart = match params.perturbation {
        Some(p) => params.chart.with_perturbation(p),
        None => params.chart,
    };
    let model = UnfoldingModel {
        lambda_u: params.lambda_u,
        lambda_s: params.lambda_s,
        b: params.b,
        kappa_u: params.kappa_u,
        kappa_s: params.kappa_s,
        r_coef: params.r_coef,
        cu_offset: params.cu_offset,
        ku: params.ku,
        ks: params.ks,
        theta_u: params.theta_u,
        theta_s: params.theta_s,
        hu0: params.hu0,
        hs0: params.hs0,
        chart,
        zeta: params.zeta,
        validity_radius: params.validity_radius,
    };
    model.validate()?;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerTarget {
    pub zeta: Complex64,
    /// `ζ·D((hᵘ)⁻¹∘hˢ)(0)⁻¹`, the value `λᵘ^m λˢ^n` should approach.
    pub v: Complex64,
    pub genericity: GenericityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormalizedPair {
    pub m: u32,
    pub n: u32,
    pub mu: Complex64,
    /// `A_{hᵘ_{μ,m}} ∘ A_{hˢ_{μ,n}}⁻¹` computed from the renormalized configurations.
    pub exact: AffineMapC,
    /// The closed form `A_{m,n}`.
    pub approx: AffineMapC,
    pub scale_error: f64,
    pub translation_error: f64,
    /// `max(scale_error, translation_error)`.
    pub error: f64,
}

/// A region of parameters: the ellipse `center + L⁻¹(B_δ)` with inscribed and
/// circumscribed radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterRegion {
    pub m: u32,
    pub center: Complex64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Exact area of the ellipse.
    pub area: f64,
    pub conformal: bool,
}

impl ParameterRegion {
    pub fn disjoint_from(&self, other: &ParameterRegion) -> bool {
        (self.center - other.center).norm() > self.outer_radius + other.outer_radius
    }
}

impl UnfoldingModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if !(self.lambda_u.norm() > 1.0) {
            return bad(format!("need |λu| > 1, got {}", self.lambda_u));
        }
        if !(self.lambda_s.norm() < 1.0 && self.lambda_s.norm() > 0.0) {
            return bad(format!("need 0 < |λs| < 1, got {}", self.lambda_s));
        }
        if !(self.b.det().abs() > 1e-12) {
            return bad(format!("B is singular (det {:e})", self.b.det()));
        }
        if !(self.chart.b_tan().norm() > 0.0) {
            return bad("b_tan = 0: the tangency is not quadratic".into());
        }
        if !(self.validity_radius > 0.0) {
            return bad("validity radius must be positive".into());
        }
        for (sys, theta, hname) in [(&self.ku, self.theta_u, "hu0"), (&self.ks, self.theta_s, "hs0")] {
            if theta.index() >= sys.alphabet_len() || !sys.transitions().contains(theta, theta) {
                return bad(format!("{hname}: fixed-point letter must carry an admissible loop"));
            }
        }
        self.hu0.check()?;
        self.hs0.check()?;
        let (pu, ps) = (self.p_u(), self.p_s());
        if self.hs0.eval(ps).norm() > MODEL_TOL {
            return bad(format!("hs0(ps) = {} must vanish", self.hs0.eval(ps)));
        }
        if self.hu0.eval(pu).norm() > MODEL_TOL {
            return bad(format!("hu0(pu) = {} must vanish", self.hu0.eval(pu)));
        }
        let gu = self.ku.branch(self.theta_u).deriv(pu);
        if (gu - self.lambda_u).norm() > MODEL_TOL * self.lambda_u.norm() {
            return bad(format!("multiplier of Ku at its fixed point is {gu}, expected λu = {}", self.lambda_u));
        }
        let gs = self.ks.branch(self.theta_s).deriv(ps);
        let expect = 1.0 / self.lambda_s;
        if (gs - expect).norm() > MODEL_TOL * expect.norm() {
            return bad(format!("multiplier of Ks at its fixed point is {gs}, expected 1/λs = {expect}"));
        }
        if self.dhu().norm() == 0.0 || self.dhs().norm() == 0.0 {
            return Err(Error::VanishingDerivative("base configuration at the fixed point".into()));
        }
        Ok(())
    }

    pub fn p_u(&self) -> Complex64 {
        self.ku.base_point(self.theta_u)
    }

    pub fn p_s(&self) -> Complex64 {
        self.ks.base_point(self.theta_s)
    }

    /// `Dhᵘ(0)`, the derivative of `hᵘ_0` at `pᵘ`.
    pub fn dhu(&self) -> Complex64 {
        self.hu0.deriv(self.p_u())
    }

    pub fn dhs(&self) -> Complex64 {
        self.hs0.deriv(self.p_s())
    }

    /// `D((hᵘ)⁻¹ ∘ hˢ)(0) = Dhˢ/Dhᵘ`.
    pub fn derivative_ratio(&self) -> Complex64 {
        self.dhs() / self.dhu()
    }

    /// `cᵘ(μ) = cᵘ(0) + B·μ + r(μ)`.
    pub fn cu(&self, mu: Complex64) -> Complex64 {
        self.cu_offset + self.b.apply(mu) + self.r_coef * mu * mu
    }

    pub fn lambda_u_at(&self, mu: Complex64) -> Complex64 {
        self.lambda_u * (1.0 + self.kappa_u * mu)
    }

    pub fn lambda_s_at(&self, mu: Complex64) -> Complex64 {
        self.lambda_s * (1.0 + self.kappa_s * mu)
    }

    fn check_mu(&self, mu: Complex64) -> Result<()> {
        if !mu.is_finite() || mu.norm() > self.validity_radius {
            return Err(Error::OutsideValidity { mu: mu.to_string(), radius: self.validity_radius });
        }
        Ok(())
    }

    /// `Kᵘ_μ`: every branch rescaled about `pᵘ` by `1 + κᵘ μ`.
    pub fn ku_at(&self, mu: Complex64) -> Result<CantorSystem> {
        drifted(&self.ku, self.p_u(), 1.0 + self.kappa_u * mu)
    }

    /// `Kˢ_μ`: every branch rescaled about `pˢ` by `1/(1 + κˢ μ)`.
    pub fn ks_at(&self, mu: Complex64) -> Result<CantorSystem> {
        drifted(&self.ks, self.p_s(), 1.0 / (1.0 + self.kappa_s * mu))
    }

    /// The configured sets `hᵘ_μ(Kᵘ_μ)` and `hˢ_μ(Kˢ_μ)`.
    pub fn configured_sets(&self, mu: Complex64) -> Result<(ConfiguredSet, ConfiguredSet)> {
        let (hu, hs) = configurations_at(self, mu)?;
        Ok((
            ConfiguredSet { system: self.ku_at(mu)?, letter: hu.letter, config: hu },
            ConfiguredSet { system: self.ks_at(mu)?, letter: hs.letter, config: hs },
        ))
    }

    /// Target of the exponent-pair search according to the ζ mode.
    pub fn kronecker_target(&self) -> Result<KroneckerTarget> {
        let genericity = genericity_check(self.lambda_u, self.lambda_s, DEFAULT_TOL, DEFAULT_COEFF_BOUND)?;
        let ratio = self.derivative_ratio();
        let resonant = |genericity| KroneckerTarget { zeta: ratio, v: c(1.0, 0.0), genericity };
        Ok(match self.zeta {
            ZetaMode::Resonant => resonant(genericity),
            ZetaMode::Auto if !genericity.is_generic() => resonant(genericity),
            ZetaMode::Auto => KroneckerTarget { zeta: c(1.0, 0.0), v: 1.0 / ratio, genericity },
            ZetaMode::Generic { zeta } => {
                if zeta.norm() == 0.0 {
                    return Err(Error::InvalidModel("ζ must be nonzero".into()));
                }
                KroneckerTarget { zeta, v: zeta / ratio, genericity }
            }
        })
    }

    /// The mirror model: all complex data conjugated, `B` conjugated by `z ↦ conj z`.
    pub fn conjugated(&self) -> Result<UnfoldingModel> {
        let zeta = match self.zeta {
            ZetaMode::Generic { zeta } => ZetaMode::Generic { zeta: zeta.conj() },
            other => other,
        };
        Ok(UnfoldingModel {
            lambda_u: self.lambda_u.conj(),
            lambda_s: self.lambda_s.conj(),
            b: self.b.mirrored(),
            kappa_u: self.kappa_u.conj(),
            kappa_s: self.kappa_s.conj(),
            r_coef: self.r_coef.conj(),
            cu_offset: self.cu_offset.conj(),
            ku: self.ku.conjugated()?,
            ks: self.ks.conjugated()?,
            theta_u: self.theta_u,
            theta_s: self.theta_s,
            hu0: self.hu0.conjugated(),
            hs0: self.hs0.conjugated(),
            chart: self.chart.conjugated(),
            zeta,
            validity_radius: self.validity_radius,
        })
    }
}

fn drifted(sys: &CantorSystem, p: Complex64, factor: Complex64) -> Result<CantorSystem> {
    if factor == c(1.0, 0.0) {
        return Ok(sys.clone());
    }
    // g ↦ p + factor·(g - p) keeps p fixed and multiplies the multiplier by `factor`
    let outer = MapExpr::affine(factor, p - factor * p);
    let branches = sys.letters().map(|a| compose_exprs(sys.branch(a).clone(), outer.clone())).collect();
    sys.with_branches(branches)
}

/// `(hᵘ_μ, hˢ_μ)` on `G(θᵘ)` and `G(θˢ)`.
pub fn configurations_at(model: &UnfoldingModel, mu: Complex64) -> Result<(Configuration, Configuration)> {
    model.check_mu(mu)?;
    let shift = MapExpr::affine(c(1.0, 0.0), model.cu(mu));
    let hu = Configuration::new(model.theta_u, compose_exprs(model.hu0.clone(), shift));
    let hs = Configuration::new(model.theta_s, model.hs0.clone());
    Ok((hu, hs))
}

/// `A_{m,n}(z) = λᵘ^m λˢ^n (Dhˢ/Dhᵘ) z - λᵘ^m (cᵘ(0) + B μ)/Dhᵘ`.
pub fn closed_form_affine(model: &UnfoldingModel, mu: Complex64, m: u32, n: u32) -> AffineMapC {
    let lu = model.lambda_u.powu(m);
    let ls = model.lambda_s.powu(n);
    AffineMapC { scale: lu * ls * model.derivative_ratio(), offset: -lu * (model.cu_offset + model.b.apply(mu)) / model.dhu() }
}

/// Largest `m` or `n` accepted by [`renormalized_pair`].
pub const MAX_RENORMALIZATION_DEPTH: u32 = 200;

/// Renormalize `hᵘ_μ` along `θᵘ^{m+1}` and `hˢ_μ` along `θˢ^{n+1}`, then compare the
/// normalizing affine maps with the closed form.
pub fn renormalized_pair(model: &UnfoldingModel, mu: Complex64, m: u32, n: u32) -> Result<RenormalizedPair> {
    if m > MAX_RENORMALIZATION_DEPTH || n > MAX_RENORMALIZATION_DEPTH {
        return Err(Error::InvalidArgument(format!("depth ({m}, {n}) exceeds cap {MAX_RENORMALIZATION_DEPTH}")));
    }
    let (hu, hs) = configurations_at(model, mu)?;
    let ku = model.ku_at(mu)?;
    let ks = model.ks_at(mu)?;
    let wu = Word::new(vec![model.theta_u; m as usize + 1], ku.transitions())?;
    let ws = Word::new(vec![model.theta_s; n as usize + 1], ks.transitions())?;
    let hu_m = renormalize(&ku, &hu, &wu)?;
    let hs_n = renormalize(&ks, &hs, &ws)?;
    let ju = hu_m.map.jet(model.p_u());
    let js = hs_n.map.jet(model.p_s());
    if !ju.is_finite() || !js.is_finite() || ju.d1.norm() == 0.0 || js.d1.norm() == 0.0 {
        return Err(Error::VanishingDerivative(format!("renormalized configuration at depth ({m}, {n})")));
    }
    // A_u(x) = (x - hu_m(p))/hu_m'(p), A_s⁻¹(ζ) = hs_n(p) + hs_n'(p) ζ
    let exact = AffineMapC { scale: js.d1 / ju.d1, offset: (js.value - ju.value) / ju.d1 };
    let approx = closed_form_affine(model, mu, m, n);
    let scale_error = (exact.scale - approx.scale).norm() / approx.scale.norm();
    let translation_error = (exact.offset - approx.offset).norm();
    Ok(RenormalizedPair {
        m,
        n,
        mu,
        exact,
        approx,
        scale_error,
        translation_error,
        error: scale_error.max(translation_error),
    })
}

/// The linear part `μ ↦ -λᵘ^m (B μ)/Dhᵘ` of the translation of `A_{m,n}`.
pub fn translation_map(model: &UnfoldingModel, m: u32) -> RealLinear {
    RealLinear::complex(-model.lambda_u.powu(m) / model.dhu()).compose(&model.b)
}

/// Parameters whose closed-form translation lies in `B_δ(ν)`. A nonzero `cᵘ(0)` moves the
/// center by `-B⁻¹ cᵘ(0)`.
pub fn select_parameters(model: &UnfoldingModel, nu: Complex64, delta: f64, m: u32) -> Result<ParameterRegion> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    let l = translation_map(model, m);
    let inv = l.inverse()?;
    let (smin, smax) = l.singular_values();
    let conformal = (smax - smin) <= 1e-12 * smax;
    Ok(ParameterRegion {
        m,
        center: inv.apply(nu + model.lambda_u.powu(m) * model.cu_offset / model.dhu()),
        inner_radius: delta / smax,
        outer_radius: delta / smin,
        area: std::f64::consts::PI * delta * delta / l.det().abs(),
        conformal,
    })
}

/// `|λᵘ(μ)^m / λᵘ^m - 1|`.
pub fn drift_ratio(model: &UnfoldingModel, mu: Complex64, m: u32) -> f64 {
    ((1.0 + model.kappa_u * mu).powu(m) - 1.0).norm()
}

/// The fat-triangle family: `Kᵘ = Kˢ` the three-branch set with contraction 0.45, placed
/// with opposite orientations at their common vertex.
pub fn fat_triangle_model() -> UnfoldingModel {
    let sys = catalog::fat_triangle_default();
    make_generic_family(FamilyParams {
        lambda_u: c(1.0 / 0.45, 0.0),
        lambda_s: c(0.45, 0.0),
        ku: sys.clone(),
        ks: sys,
        hu0: MapExpr::affine(c(1.0, 0.0), c(-1.0, 0.0)),
        hs0: MapExpr::affine(c(-1.0, 0.0), c(1.0, 0.0)),
        ..FamilyParams::default()
    })
    .expect("fat-triangle model is valid")
}

/// The fat-triangle family displaced by `cᵘ(0) = 3`, so the two sets never meet near `μ = 0`.
pub fn separated_model() -> UnfoldingModel {
    let mut m = fat_triangle_model();
    m.cu_offset = c(3.0, 0.0);
    m
}

/// Quadratic-branch family `g(z) = z² - 6` for both sets (fixed point 3, `λᵘ = 6`), with
/// nonlinear base configurations, eigenvalue drift and `r(μ) = μ²/2`.
pub fn quadratic_model() -> UnfoldingModel {
    let sys = catalog::quadratic_default();
    // (z - 3) + 0.1 (z - 3)² and -(z - 3) + 0.05 (z - 3)²
    let hu0 = MapExpr::poly(vec![c(-3.0 + 0.9, 0.0), c(1.0 - 0.6, 0.0), c(0.1, 0.0)]);
    let hs0 = MapExpr::poly(vec![c(3.0 + 0.45, 0.0), c(-1.0 - 0.3, 0.0), c(0.05, 0.0)]);
    make_generic_family(FamilyParams {
        lambda_u: c(6.0, 0.0),
        lambda_s: c(1.0 / 6.0, 0.0),
        kappa_u: c(0.3, 0.0),
        kappa_s: c(0.2, 0.0),
        r_coef: c(0.5, 0.0),
        ku: sys.clone(),
        ks: sys,
        hu0,
        hs0,
        ..FamilyParams::default()
    })
    .expect("quadratic model is valid")
}

/// Built-in models by name.
pub fn builtin_model(name: &str) -> Option<UnfoldingModel> {
    match name {
        "default" => make_generic_family(FamilyParams::default()).ok(),
        "fat-triangle" => Some(fat_triangle_model()),
        "separated" => Some(separated_model()),
        "quadratic" => Some(quadratic_model()),
        _ => None,
    }
}

pub const BUILTIN_MODELS: &[&str] = &["default", "fat-triangle", "separated", "quadratic"];

/// A Cantor system given by built-in name, file path, or inline document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Builtin { builtin: String },
    Path { path: String },
    Inline(SystemDoc),
}

impl SystemRef {
    pub fn resolve(&self, base_dir: &Path) -> Result<CantorSystem> {
        match self {
            SystemRef::Builtin { builtin } => catalog::builtin(builtin)
                .ok_or_else(|| Error::InvalidModel(format!("unknown built-in system `{builtin}`"))),
            SystemRef::Path { path } => {
                let text = std::fs::read_to_string(base_dir.join(path))?;
                CantorSystem::from_json(&text)
            }
            SystemRef::Inline(doc) => CantorSystem::from_doc(doc),
        }
    }
}

fn zero() -> Complex64 {
    c(0.0, 0.0)
}

fn default_zeta() -> ZetaMode {
    ZetaMode::Auto
}

fn default_radius() -> f64 {
    0.5
}

/// JSON form of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub lambda_u: Complex64,
    pub lambda_s: Complex64,
    pub b: [[f64; 2]; 2],
    #[serde(default = "zero")]
    pub kappa_u: Complex64,
    #[serde(default = "zero")]
    pub kappa_s: Complex64,
    #[serde(default = "zero")]
    pub r_coef: Complex64,
    #[serde(default = "zero")]
    pub cu_offset: Complex64,
    pub ku: SystemRef,
    pub ks: SystemRef,
    pub theta_u: String,
    pub theta_s: String,
    pub hu0: MapExpr,
    pub hs0: MapExpr,
    pub chart: TangencyChart,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationPoly>,
    #[serde(default = "default_zeta")]
    pub zeta: ZetaMode,
    #[serde(default = "default_radius")]
    pub validity_radius: f64,
}

/// A model file: either `{"builtin": name}` or a full document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Builtin { builtin: String },
    Doc(Box<ModelDoc>),
}

impl UnfoldingModel {
    /// Parse a model; relative system paths are resolved against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<UnfoldingModel> {
        match serde_json::from_str::<ModelSpec>(text)? {
            ModelSpec::Builtin { builtin } => {
                builtin_model(&builtin).ok_or_else(|| Error::InvalidModel(format!("unknown built-in model `{builtin}`")))
            }
            ModelSpec::Doc(doc) => UnfoldingModel::from_doc(&doc, base_dir),
        }
    }

    pub fn from_doc(doc: &ModelDoc, base_dir: &Path) -> Result<UnfoldingModel> {
        let ku = doc.ku.resolve(base_dir)?;
        let ks = doc.ks.resolve(base_dir)?;
        let theta_u = ku.letter(&doc.theta_u)?;
        let theta_s = ks.letter(&doc.theta_s)?;
        make_generic_family(FamilyParams {
            lambda_u: doc.lambda_u,
            lambda_s: doc.lambda_s,
            b: RealLinear(doc.b),
            kappa_u: doc.kappa_u,
            kappa_s: doc.kappa_s,
            r_coef: doc.r_coef,
            cu_offset: doc.cu_offset,
            ku,
            ks,
            theta_u,
            theta_s,
            hu0: doc.hu0.clone(),
            hs0: doc.hs0.clone(),
            chart: doc.chart.clone(),
            perturbation: doc.perturbation.clone(),
            zeta: doc.zeta,
            validity_radius: doc.validity_radius,
        })
    }

    /// Document with both systems inline. The perturbation is already part of the chart.
    pub fn to_doc(&self) -> ModelDoc {
        ModelDoc {
            lambda_u: self.lambda_u,
            lambda_s: self.lambda_s,
            b: self.b.0,
            kappa_u: self.kappa_u,
            kappa_s: self.kappa_s,
            r_coef: self.r_coef,
            cu_offset: self.cu_offset,
            ku: SystemRef::Inline(self.ku.to_doc()),
            ks: SystemRef::Inline(self.ks.to_doc()),
            theta_u: self.ku.name(self.theta_u).to_string(),
            theta_s: self.ks.name(self.theta_s).to_string(),
            hu0: self.hu0.clone(),
            hs0: self.hs0.clone(),
            chart: TangencyChart { perturbation: None, ..self.chart.clone() },
            perturbation: None,
            zeta: self.zeta,
            validity_radius: self.validity_radius,
        }
    }
}
