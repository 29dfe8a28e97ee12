mod common;

use std::path::Path;

use cantorlab::catalog::{fat_triangle_default, middle_thirds};
use cantorlab::kronecker::{find_pairs, recurrence_gap_of};
use cantorlab::unfolding::scan::{geometric_sum, CELL_OUTSIDE, CELL_TANGENT};
use cantorlab::unfolding::*;
use cantorlab::{Complex64, Disk, MapExpr};
use common::*;

fn default_model() -> UnfoldingModel {
    make_generic_family(FamilyParams::default()).unwrap()
}

fn leaf(coeffs: Vec<Complex64>, label_quad: Complex64) -> LeafFamily {
    LeafFamily { coeffs, label_quad }
}

#[test]
fn default_family_and_invariants() {
    let m = default_model();
    assert_eq!(m.p_u(), c(0.0, 0.0));
    assert_eq!(m.chart.b_tan(), c(1.0, 0.0));
    assert!(make_generic_family(FamilyParams { chart: TangencyChart::quadratic(c(0.0, 0.0), c(1.0, 0.0)), ..FamilyParams::default() }).is_err());
    assert!(make_generic_family(FamilyParams { b: RealLinear([[1.0, 2.0], [0.5, 1.0]]), ..FamilyParams::default() }).is_err());
    assert!(make_generic_family(FamilyParams { lambda_u: c(0.9, 0.0), ..FamilyParams::default() }).is_err());
    // multiplier of middle-thirds at 0 is 3, not 2
    assert!(make_generic_family(FamilyParams { lambda_u: c(2.0, 0.0), ..FamilyParams::default() }).is_err());
    // hs0 must send the fixed point to 0
    assert!(make_generic_family(FamilyParams { hs0: MapExpr::affine(c(1.0, 0.0), c(0.1, 0.0)), ..FamilyParams::default() }).is_err());
    for name in BUILTIN_MODELS {
        assert!(builtin_model(name).is_some(), "{name}");
    }
    fat_triangle_model().validate().unwrap();
    quadratic_model().validate().unwrap();
}

#[test]
fn localized_perturbation_is_flat_at_the_tangency() {
    let delta = 0.01;
    let roots = vec![c(10.0 * delta, 0.0), c(0.0, -12.0 * delta), c(-0.08, 0.07)];
    let p = PerturbationPoly { a: c(0.7, 0.2), k: 8, roots: roots.clone() };
    let model = make_generic_family(FamilyParams { perturbation: Some(p.clone()), ..FamilyParams::default() }).unwrap();
    let b_tan = model.chart.b_tan();
    // closed form at 0: p = p' = 0, p'' = 2a Π(-q)^k
    let pp0 = 2.0 * p.a * roots.iter().map(|q| (-q).powu(8)).product::<Complex64>();
    let (v, d1, d2) = p.jet(c(0.0, 0.0));
    assert!(v.norm() < 1e-6 * b_tan.norm() && d1.norm() < 1e-6 * b_tan.norm() && d2.norm() < 1e-6 * b_tan.norm());
    assert!((d2 - pp0).norm() <= 1e-12 * pp0.norm().max(1e-300));
    // the product form agrees with the expanded coefficients away from 0
    let z = c(0.05, 0.03);
    let direct = p.a * z * z * roots.iter().map(|q| (z - q).powu(8)).product::<Complex64>();
    assert!((p.jet(z).0 - direct).norm() <= 1e-12 * direct.norm());

    let flat = make_generic_family(FamilyParams {
        perturbation: Some(PerturbationPoly { a: c(0.0, 0.0), k: 8, roots }),
        ..FamilyParams::default()
    })
    .unwrap();
    for &(z, mu) in &[(c(0.3, 0.1), c(0.01, 0.02)), (c(-0.7, 0.4), c(-0.2, 0.0))] {
        assert_eq!(flat.chart.gap(z, mu), z * z + mu);
    }
}

#[test]
fn tangency_disk_pure_quadratic() {
    let chart = TangencyChart {
        unstable: leaf(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.5, 0.5)], c(0.0, 0.0)),
        stable: leaf(vec![c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)], c(0.0, 0.0)),
        c_tan: c(1.0, 0.0),
        perturbation: None,
    };
    let ws = window_grid(&Disk::new(c(0.0, 0.0), 0.2), 8);
    assert_eq!(ws.len(), 64);
    for p in tangency_disk(&chart, c(0.01, -0.02), &ws) {
        assert!(p.converged);
        assert_eq!(p.z, c(0.0, 0.0));
        assert!(p.residual < 1e-10);
        assert!((p.second_derivative_gap - 2.0 * c(2.0, 0.5)).norm() < 1e-12);
    }
}

#[test]
fn tangency_disk_cubic_matches_closed_form() {
    // slope gap -e1 + 2Δz + 3εz² with Δ = b_u - b_s
    let (e1, delta, eps) = (c(0.02, 0.01), c(1.0, 0.0), c(0.3, -0.1));
    let chart = TangencyChart {
        unstable: leaf(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0) + delta, eps], c(0.0, 0.0)),
        stable: leaf(vec![c(0.0, 0.0), e1, c(1.0, 0.0)], c(0.0, 0.0)),
        c_tan: c(1.0, 0.0),
        perturbation: None,
    };
    let disc = (4.0 * delta * delta + 12.0 * eps * e1).sqrt();
    let roots = [(-2.0 * delta + disc) / (6.0 * eps), (-2.0 * delta - disc) / (6.0 * eps)];
    let near = if roots[0].norm() < roots[1].norm() { roots[0] } else { roots[1] };
    let ws = window_grid(&Disk::new(c(0.1, 0.0), 0.3), 8);
    for p in tangency_disk(&chart, c(0.0, 0.0), &ws) {
        assert!(p.converged && p.residual < 1e-10);
        assert!((p.z - near).norm() < 1e-10, "{} vs {}", p.z, near);
        let expect = 2.0 * delta + 6.0 * eps * near;
        assert!((p.second_derivative_gap - expect).norm() < 1e-9);
    }
}

#[test]
fn tangency_disk_depends_on_the_leaf() {
    let chart = TangencyChart {
        unstable: leaf(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.0)], c(0.3, 0.1)),
        stable: leaf(vec![c(0.0, 0.0), c(0.01, 0.0), c(-0.5, 0.0)], c(-0.2, 0.0)),
        c_tan: c(1.0, 0.0),
        perturbation: None,
    };
    let ws = window_grid(&Disk::new(c(0.0, 0.0), 0.25), 8);
    let pts = tangency_disk(&chart, c(0.05, 0.02), &ws);
    assert_eq!(pts.len(), 64);
    for p in &pts {
        assert!(p.converged && p.residual < 1e-10);
        // independent residual: slope gap by central differences of the two graphs
        let y = |z: Complex64| p.w + chart.stable.coeffs[1] * z + chart.stable.coeffs[2] * z * z + chart.stable.label_quad * p.w * z * z;
        let wu = (y(p.z) - p.z * p.z - 0.2 * p.z.powu(3) - c(0.05, 0.02)) / (1.0 + c(0.3, 0.1) * p.z * p.z);
        let gu = |z: Complex64| wu + z * z + 0.2 * z.powu(3) + c(0.3, 0.1) * wu * z * z + c(0.05, 0.02);
        let h = 1e-5;
        let slope = |g: &dyn Fn(Complex64) -> Complex64| (g(p.z + h) - g(p.z - h)) / (2.0 * h);
        assert!((slope(&gu) - slope(&y)).norm() < 1e-8);
        assert!(p.second_derivative_gap.norm() > 0.5);
    }
    let spread = pts.iter().map(|p| (p.z - pts[0].z).norm()).fold(0.0, f64::max);
    assert!(spread > 1e-4);
    require_ok(&pts);
}

fn require_ok(pts: &[TangencyPoint]) {
    cantorlab::unfolding::tangency::require_converged(pts).unwrap();
}

#[test]
fn configurations_and_generic_motion() {
    let mut params = FamilyParams { b: RealLinear([[1.0, 0.4], [-0.3, 2.0]]), r_coef: c(1.0, 0.0), ..FamilyParams::default() };
    params.validity_radius = 0.2;
    let model = make_generic_family(params).unwrap();
    let (hu, hs) = configurations_at(&model, c(0.0, 0.0)).unwrap();
    assert_eq!(hu.eval(model.p_u()), c(0.0, 0.0));
    assert_eq!(hs.eval(model.p_s()), c(0.0, 0.0));
    // ∂cᵘ/∂μ = B on both real directions
    let h = 1e-7;
    for (dir, col) in [(c(1.0, 0.0), 0), (c(0.0, 1.0), 1)] {
        let fd = (model.cu(dir * h) - model.cu(-dir * h)) / (2.0 * h);
        let b = c(model.b.0[0][col], model.b.0[1][col]);
        assert!((fd - b).norm() < 1e-6 * b.norm());
    }
    for mu in [c(0.01, 0.02), c(-0.1, 0.05)] {
        let r = model.cu(mu) - model.b.apply(mu);
        assert!((r.norm() - mu.norm_sqr()).abs() < 1e-15);
    }
    assert!(configurations_at(&model, c(0.3, 0.0)).is_err());
}

#[test]
fn renormalized_pair_at_zero_and_affine_exactness() {
    let model = default_model();
    let p = renormalized_pair(&model, c(0.0, 0.0), 4, 6).unwrap();
    assert_eq!(p.approx.offset, c(0.0, 0.0));
    assert!(p.exact.offset.norm() < 1e-15);
    for m in 2..=8 {
        for n in 2..=8 {
            let mu = c(0.3, -0.2) / 3f64.powi(m as i32);
            let p = renormalized_pair(&model, mu, m, n).unwrap();
            assert!(p.error < 1e-12, "({m},{n}) {}", p.error);
            // independent oracle: 3^m 3^-n and -3^m μ
            assert!((p.approx.scale - c(3f64.powi(m as i32 - n as i32), 0.0)).norm() < 1e-12 * p.approx.scale.norm());
            assert!((p.approx.offset + 3f64.powi(m as i32) * mu).norm() < 1e-13);
        }
    }
    assert!(renormalized_pair(&model, c(0.0, 0.0), 500, 2).is_err());
}

#[test]
fn nonlinear_error_follows_a_power_law() {
    let model = quadratic_model();
    let target = model.kronecker_target().unwrap();
    assert!(!target.genericity.is_generic());
    let pairs = find_pairs(model.lambda_u, model.lambda_s, target.v, 0.1, 10, 10).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in pairs.pairs.iter().filter(|p| p.m >= 4) {
        let mu = select_parameters(&model, c(-0.3, 0.0), 0.05, p.m).unwrap().center;
        let r = renormalized_pair(&model, mu, p.m, p.n).unwrap();
        let x = model.lambda_s.norm().powi(p.n as i32).max(model.lambda_u.norm().powi(-(p.m as i32)));
        xs.push(x.ln());
        ys.push(r.error.ln());
    }
    assert!(xs.len() >= 5);
    // least-squares fit log err = log C + ε' log x
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let log_c = my - slope * mx;
    assert!(slope > 0.5, "ε' = {slope}");
    for (x, y) in xs.iter().zip(&ys) {
        assert!(*y <= log_c + slope * x + 0.5f64.ln().abs(), "outside 1.5x envelope");
    }
}

#[test]
fn select_parameters_examples() {
    let params = FamilyParams {
        lambda_u: c(2.0, 0.0),
        lambda_s: c(0.5, 0.0),
        ku: cantorlab::catalog::fat_pair(0.5, 0.2),
        ks: cantorlab::catalog::fat_pair(0.5, 0.2),
        ..FamilyParams::default()
    };
    let model = make_generic_family(params).unwrap();
    let r = select_parameters(&model, c(0.5, 0.0), 0.1, 3).unwrap();
    // the translation of A_{m,n} is -λ^m μ, so ν = 0.5 is reached at μ = -0.0625
    assert!((r.center - c(-0.0625, 0.0)).norm() < 1e-15);
    assert!((r.inner_radius - 0.0125).abs() < 1e-15 && (r.outer_radius - 0.0125).abs() < 1e-15);
    assert!(r.conformal);
    for m in [1, 4, 9] {
        assert_eq!(select_parameters(&model, c(0.0, 0.0), 0.1, m).unwrap().center.norm(), 0.0);
    }

    let mut skew = model.clone();
    skew.b = RealLinear([[1.0, 0.0], [0.0, 2.0]]);
    let nu = c(0.2, -0.1);
    let r = select_parameters(&skew, nu, 0.1, 3).unwrap();
    assert!(!r.conformal);
    for k in 0..1000 {
        let t = std::f64::consts::TAU * k as f64 / 1000.0;
        let mu = r.center + Complex64::from_polar(r.inner_radius, t);
        let image = -8.0 * skew.b.apply(mu);
        assert!((image - nu).norm() <= 0.1 * (1.0 + 1e-12));
    }
    // the circumscribed circle reaches the ellipse
    let far = (0..1000)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 1000.0;
            let mu = r.center + Complex64::from_polar(r.outer_radius, t);
            (-8.0 * skew.b.apply(mu) - nu).norm()
        })
        .fold(f64::INFINITY, f64::min);
    assert!((far - 0.1).abs() < 1e-9);
    let mut singular = model.clone();
    singular.b = RealLinear([[1.0, 1.0], [1.0, 1.0]]);
    assert!(select_parameters(&singular, nu, 0.1, 3).is_err());
}

#[test]
fn eigenvalue_drift_decreases() {
    let model = quadratic_model();
    let ratios: Vec<f64> = (4..=14).map(|m| drift_ratio(&model, 6f64.powi(-m).into(), m as u32)).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    // oracle: m κ λ^-m to first order
    assert!((ratios[0] - 4.0 * 0.3 / 1296.0).abs() < 1e-6);
}

#[test]
fn scan_trivial_models() {
    let sep = separated_model();
    let row = scan_tangency_set(&sep, 0.125, 64, 6, 0.05).unwrap();
    assert_eq!(row.tangent, 0);
    assert_eq!(row.fraction, 0.0);
    assert!(row.inside > 3000);

    let mut same = fat_triangle_model();
    same.b = RealLinear([[0.0, 0.0], [0.0, 0.0]]);
    same.hs0 = same.hu0.clone();
    let row = scan_tangency_set(&same, 0.125, 64, 6, 0.05).unwrap();
    assert_eq!(row.fraction, 1.0);

    assert!(scan_tangency_set(&sep, 0.125, 32, 6, 0.05).is_err());
    assert!(scan_tangency_set(&sep, 0.9, 64, 6, 0.05).is_err());
}

#[test]
fn scan_is_deterministic_and_mirror_symmetric() {
    let base = fat_triangle_model();
    let mut model = base.clone();
    model.b = RealLinear([[1.0, 0.3], [-0.2, 1.1]]);
    let res = 96;
    let a = scan_tangency_set(&model, 0.0625, res, 8, 0.05).unwrap();
    let again = scan_tangency_set(&model, 0.0625, res, 8, 0.05).unwrap();
    assert_eq!(a.mask, again.mask);
    let mirror = model.conjugated().unwrap();
    let b = scan_tangency_set(&mirror, 0.0625, res, 8, 0.05).unwrap();
    let mut mismatch = 0;
    let mut inside = 0;
    for j in 0..res {
        for i in 0..res {
            let x = a.mask[j * res + i];
            if x == CELL_OUTSIDE {
                continue;
            }
            inside += 1;
            if (x == CELL_TANGENT) != (b.mask[(res - 1 - j) * res + i] == CELL_TANGENT) {
                mismatch += 1;
            }
        }
    }
    assert!((mismatch as f64) < 2.0 / res as f64 * inside as f64, "{mismatch} of {inside}");
    assert!(a.fraction > 0.0);
}

#[test]
fn selected_regions_are_tangent() {
    let model = fat_triangle_model();
    let (nu, delta) = (c(-0.41, 0.0), 0.03);
    let res = 256;
    for m in [2u32, 3] {
        let region = select_parameters(&model, nu, delta, m).unwrap();
        let eps = region.center.norm() + region.outer_radius;
        let depth = depth_for_scale(&model, eps, 6);
        let row = scan_tangency_set(&model, eps, res, depth, 0.05).unwrap();
        let (mut total, mut miss) = (0, 0);
        for j in 0..res {
            for i in 0..res {
                let mu = row.cell_center(i, j);
                if (mu - region.center).norm() < region.inner_radius {
                    total += 1;
                    if row.mask[j * res + i] != CELL_TANGENT {
                        miss += 1;
                    }
                }
            }
        }
        assert!(total > 100);
        assert!((miss as f64) < 2.0 / res as f64 * total as f64, "m={m}: {miss} of {total}");
    }
}

#[test]
fn density_bound_examples() {
    let model = fat_triangle_model();
    let target = model.kronecker_target().unwrap();
    assert_eq!(target.zeta, c(-1.0, 0.0));
    let search = find_pairs(model.lambda_u, model.lambda_s, target.v, 0.1, 30, 30).unwrap();
    assert!(search.pairs.iter().all(|p| p.m == p.n));
    let gap = recurrence_gap_of(&search).unwrap();
    assert_eq!(gap.m_gap, 1);

    let (nu, delta, eps) = (c(-0.41, 0.0), 0.03, 0.125);
    let single: Vec<_> = search.pairs.iter().filter(|p| p.m == 3).cloned().collect();
    let one = density_lower_bound(&model, nu, delta, eps, &single, 1).unwrap();
    let region = select_parameters(&model, nu, delta, 3).unwrap();
    assert!((one.selected_value - region.area / (std::f64::consts::PI * eps * eps)).abs() < 1e-15);
    assert_eq!(one.kept.len(), 1);

    let all = density_lower_bound(&model, nu, delta, eps, &search.pairs, gap.m_gap).unwrap();
    assert_eq!(all.m0, Some(2));
    assert!(all.dropped.iter().all(|d| d.m < 2 || d.reason.contains("overlap")));
    // the truncated sum approaches the geometric value from below
    assert!(all.selected_value <= all.value * (1.0 + 1e-12));
    assert!((all.selected_value - all.value).abs() < 1e-12);

    // overlapping regions are reported
    let wide = density_lower_bound(&model, nu, 0.2, eps, &search.pairs, 1).unwrap();
    assert!(wide.dropped.iter().any(|d| d.reason.contains("overlap")));
    assert!(density_lower_bound(&model, nu, delta, eps, &[], 1).is_err());

    // the displaced family selects parameters near -cᵘ(0) = -3, far outside εD
    let sep = separated_model();
    let r = select_parameters(&sep, nu, delta, 3).unwrap();
    assert!((r.center - (c(-3.0, 0.0) + region.center)).norm() < 1e-12);
    let none = density_lower_bound(&sep, nu, delta, eps, &search.pairs, 1).unwrap();
    assert!(none.kept.is_empty());
    assert_eq!(none.value, 0.0);
    let p = renormalized_pair(&sep, c(0.01, -0.02), 3, 3).unwrap();
    assert!(p.error < 1e-12, "{}", p.error);
}

#[test]
fn geometric_sum_matches_terms() {
    let closed = geometric_sum(2.0, 4, 2);
    let terms: f64 = (0..200).map(|j| 2f64.powi(-2 * (4 + 2 * j))).sum();
    assert!((closed - terms).abs() < 1e-14);
    // consecutive terms shrink by 2^-4
    assert!((2f64.powi(-2 * 6) / 2f64.powi(-2 * 4) - 2f64.powi(-4)).abs() < 1e-18);
}

#[test]
fn model_json_round_trip() {
    for name in BUILTIN_MODELS {
        let model = builtin_model(name).unwrap();
        let text = serde_json::to_string(&model.to_doc()).unwrap();
        let back = UnfoldingModel::from_json(&text, Path::new(".")).unwrap();
        assert_eq!(back.to_doc(), model.to_doc(), "{name}");
    }
    let m = UnfoldingModel::from_json(r#"{"builtin": "fat-triangle"}"#, Path::new(".")).unwrap();
    assert_eq!(m.to_doc(), fat_triangle_model().to_doc());
    assert!(UnfoldingModel::from_json(r#"{"builtin": "nope"}"#, Path::new(".")).is_err());
    let mut doc = fat_triangle_model().to_doc();
    doc.ku = SystemRef::Builtin { builtin: "fat-triangle".into() };
    doc.ks = SystemRef::Builtin { builtin: "middle-thirds".into() };
    // Ks multiplier no longer matches 1/λs
    assert!(UnfoldingModel::from_doc(&doc, Path::new(".")).is_err());
    let _ = (middle_thirds(), fat_triangle_default());
}

#[test]
fn conjugation_is_an_involution() {
    let model = quadratic_model();
    let twice = model.conjugated().unwrap().conjugated().unwrap();
    assert_eq!(twice.to_doc(), model.to_doc());
}
