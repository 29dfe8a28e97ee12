mod common;

use cantorlab::catalog::{fat_pair_default, fat_triangle_default, middle_thirds, quadratic_default};
use cantorlab::limit::*;
use cantorlab::{CantorSystem, Disk, Letter, MapExpr, TailSequence};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tail(sys: &CantorSystem, text: &str) -> TailSequence {
    TailSequence::parse(text, |s| sys.letter(s), sys.transitions()).unwrap()
}

/// `z + a (z - p)^2 + b (z - p)^3` with small random `a`, `b`.
fn random_config(rng: &mut ChaCha8Rng, p: cantorlab::Complex64) -> MapExpr {
    let a = c(rng.gen_range(-0.08..0.08), rng.gen_range(-0.08..0.08));
    let b = c(rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03));
    // expand around the origin
    let coeffs = vec![
        a * p * p - b * p * p * p,
        c(1.0, 0.0) - 2.0 * a * p + 3.0 * b * p * p,
        a - 3.0 * b * p,
        b,
    ];
    MapExpr::poly(coeffs)
}

#[test]
fn affine_map_algebra() {
    let f = AffineMapC::new(c(2.0, 1.0), c(-1.0, 0.5)).unwrap();
    let g = AffineMapC::new(c(0.5, -0.3), c(0.2, 0.0)).unwrap();
    let z = c(0.3, -0.7);
    assert!((f.compose(&g).apply(z) - f.apply(g.apply(z))).norm() < 1e-15);
    assert!((f.inverse().apply(f.apply(z)) - z).norm() < 1e-15);
    assert!(AffineMapC::new(c(0.0, 0.0), c(1.0, 0.0)).is_err());
}

#[test]
fn renormalize_examples() {
    let sys = middle_thirds();
    let a = Letter(0);
    let aa = sys.word_from_names(&["a", "a"]).unwrap();
    let r = renormalize(&sys, &Configuration::identity(a), &aa).unwrap();
    assert_eq!(r.as_affine().unwrap(), AffineMapC::new(c(1.0 / 3.0, 0.0), c(0.0, 0.0)).unwrap());
    let twice = renormalize(&sys, &r, &aa).unwrap();
    let once = renormalize(&sys, &Configuration::identity(a), &sys.word_from_names(&["a", "a", "a"]).unwrap()).unwrap();
    let grid = sys.piece(a).grid(9);
    assert!(sup_distance(&grid, |z| twice.eval(z), |z| once.eval(z)) < 1e-15);
    let h = Configuration::affine(a, AffineMapC::new(c(2.0, 1.0), c(0.5, 0.0)).unwrap());
    let hr = renormalize(&sys, &h, &sys.word_from_names(&["a", "b"]).unwrap()).unwrap();
    assert_eq!(hr.letter, Letter(1));
    assert!((hr.as_affine().unwrap().scale - c(2.0, 1.0) / 3.0).norm() < 1e-15);
    let wrong = Configuration::identity(Letter(1));
    assert!(matches!(renormalize(&sys, &wrong, &aa), Err(cantorlab::Error::DomainMismatch { .. })));
}

#[test]
fn renormalization_cocycle() {
    let sys = quadratic_default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let letters: Vec<Letter> = (0..7).map(|_| Letter(rng.gen_range(0..2))).collect();
        let w1 = sys.word(letters[..4].to_vec()).unwrap();
        let w2 = sys.word(letters[3..].to_vec()).unwrap();
        let h = Configuration::new(w1.first(), random_config(&mut rng, sys.piece(w1.first()).center));
        let step = renormalize(&sys, &renormalize(&sys, &h, &w1).unwrap(), &w2).unwrap();
        let joined = renormalize(&sys, &h, &w1.join(&w2).unwrap()).unwrap();
        let grid = sys.piece(w2.last()).grid(15);
        assert!(sup_distance(&grid, |z| step.eval(z), |z| joined.eval(z)) < 1e-10);
    }
}

#[test]
fn normalize_examples() {
    let a = Letter(0);
    let h = Configuration::affine(a, AffineMapC::new(c(2.0, 0.0), c(1.0, 0.0)).unwrap());
    let (aff, n) = normalize_affine(&h, c(0.0, 0.0)).unwrap();
    assert_eq!(aff, AffineMapC::new(c(0.5, 0.0), c(-0.5, 0.0)).unwrap());
    assert_eq!(n.as_affine().unwrap(), AffineMapC::identity());

    let sys = quadratic_default();
    let h = Configuration::new(a, random_config(&mut ChaCha8Rng::seed_from_u64(1), sys.piece(a).center));
    let (_, n1) = normalize_affine(&h, sys.base_point(a)).unwrap();
    let (_, n2) = normalize_affine(&n1, sys.base_point(a)).unwrap();
    let grid = sys.piece(a).grid(15);
    assert!(sup_distance(&grid, |z| n1.eval(z), |z| n2.eval(z)) < 1e-13);

    // z^2 + z on D(0, 0.3): normalization at 0 is trivial, distance to identity is sup |z|^2
    let piece = Disk::new(c(0.0, 0.0), 0.3);
    let h = Configuration::new(a, MapExpr::poly(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]));
    let (aff, n) = normalize_affine(&h, c(0.0, 0.0)).unwrap();
    assert_eq!(aff, AffineMapC::identity());
    let grid = evaluation_grid(&piece);
    let oracle = grid.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    assert!((sup_distance(&grid, |z| n.eval(z), |z| z) - oracle).abs() < 1e-15);
    assert!((oracle - 0.09).abs() < 1e-12);

    let flat = Configuration::new(a, MapExpr::poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
    assert!(normalize_affine(&flat, c(0.0, 0.0)).is_err());
}

#[test]
fn affine_systems_have_translation_limit_geometries() {
    for sys in [middle_thirds(), fat_pair_default(), fat_triangle_default()] {
        for text in ["(a)", "(b)", "(ab)", "(ba)a", "(a)bb"] {
            let t = tail(&sys, text);
            let k = limit_geometry(&sys, &t, 1e-12).unwrap();
            assert_eq!(k.depth, 1);
            assert_eq!(k.error_bound, 0.0);
            let cb = sys.base_point(t.last());
            let grid = evaluation_grid(&sys.piece(t.last()));
            assert!(sup_distance(&grid, |z| k.eval(z), |z| z - cb) < 1e-12);
        }
    }
    let sys = middle_thirds();
    let k = limit_geometry(&sys, &tail(&sys, "(a)"), 1e-12).unwrap();
    assert_eq!(k.base, c(0.0, 0.0));
    assert_eq!(k.eval(c(0.1, 0.05)), c(0.1, 0.05));
}

#[test]
fn quadratic_limit_geometry_converges_geometrically() {
    let sys = quadratic_default();
    let t = tail(&sys, "(a)");
    let k = limit_geometry(&sys, &t, 1e-8).unwrap();
    assert!(k.error_bound < 1e-7 && k.error_bound > 0.0);
    let (cz, dz) = (k.eval(k.base), k.deriv(k.base));
    assert!(cz.norm() < 1e-14 && (dz - 1.0).norm() < 1e-13);

    let d = successive_distances(&sys, &t, &MapExpr::identity(), 2..=12).unwrap();
    let depths: Vec<usize> = (2..=12).collect();
    let (_, eta) = fit_geometric(&depths, &d).unwrap();
    assert!(eta < 0.95);
    for w in d.windows(2) {
        let r = w[1] / w[0];
        assert!(r < 0.95 && (r - eta).abs() < 0.25 * eta, "ratio {r} vs fitted {eta}");
    }
    // a deeper truncation stays within the certified bound
    let deep = limit_geometry(&sys, &t, 1e-13).unwrap();
    let grid = evaluation_grid(&sys.piece(t.last()));
    assert!(sup_distance(&grid, |z| k.eval(z), |z| deep.eval(z)) <= k.error_bound + deep.error_bound);
}

#[test]
fn random_configurations_are_attracted_at_a_stable_rate() {
    let sys = quadratic_default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for text in ["(a)", "(ab)", "(b)a"] {
        let t = tail(&sys, text);
        let mut etas = Vec::new();
        for _ in 0..2 {
            let h = random_config(&mut rng, c(0.0, 0.0));
            let d = successive_distances(&sys, &t, &h, 4..=12).unwrap();
            // contraction is measured over one period of the tail
            let p = t.block.len();
            for w in d.windows(p + 1) {
                assert!(w[p] / w[0] < 0.95);
            }
            let fitted = fit_geometric(&(4..=12).collect::<Vec<_>>(), &d).unwrap().1;
            assert!(fitted < 0.95);
            etas.push(fitted);
        }
        assert!((etas[0] - etas[1]).abs() <= 0.2 * etas[0], "{etas:?}");
    }
}

#[test]
fn fixed_point_scaling() {
    let sys = quadratic_default();
    let a = sys.letter("a").unwrap();
    let t = tail(&sys, "(a)");
    // g(z) = z^2 - 6 fixes 3 with multiplier 6
    assert!((sys.base_point(a) - c(3.0, 0.0)).norm() < 1e-14);
    let k = limit_geometry(&sys, &t, 1e-10).unwrap();
    let f = affine_transfer_from(&sys, &k, a).unwrap();
    assert!((f.scale - c(1.0 / 6.0, 0.0)).norm() < 1e-8);
    assert!(f.offset.norm() < 1e-8);
    let r = renormalize(&sys, &k.configuration(), &sys.word_from_names(&["a", "a"]).unwrap()).unwrap();
    let (_, n) = normalize_affine(&r, k.base).unwrap();
    let grid = evaluation_grid(&sys.piece(a));
    assert!(sup_distance(&grid, |z| n.eval(z), |z| k.eval(z)) < 1e-8);
}

#[test]
fn affine_transfer_on_affine_system() {
    let sys = middle_thirds();
    let t = tail(&sys, "(a)");
    let f = affine_transfer(&sys, &t, sys.letter("b").unwrap(), 1e-12).unwrap();
    // f_{a,b} = z/3 and c_b = 1, c_a = 0
    assert!((f.scale - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    assert!((f.offset - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    let golden = thirds_with(thirds_pieces(), thirds_branches(), cantorlab::TransitionSet::from_pairs(2, &[(0, 0), (0, 1), (1, 0)]), None);
    let tb = TailSequence::parse("(a)b", |s| golden.letter(s), golden.transitions()).unwrap();
    assert!(affine_transfer(&golden, &tb, Letter(1), 1e-12).is_err());
}

#[test]
fn affine_transfer_residual_on_quadratic_system() {
    let sys = quadratic_default();
    for (text, next) in [("(a)", "b"), ("(ab)", "a"), ("(b)", "b")] {
        let t = tail(&sys, text);
        let nl = sys.letter(next).unwrap();
        let k = limit_geometry(&sys, &t, 1e-9).unwrap();
        let k1 = limit_geometry(&sys, &t.extended(nl), 1e-9).unwrap();
        let f = affine_transfer_from(&sys, &k, nl).unwrap();
        let branch = sys.inverse_branch(t.last(), nl).unwrap();
        let grid = evaluation_grid(&sys.piece(nl));
        let residual = sup_distance(&grid, |z| k.eval(branch.eval(z)), |z| f.apply(k1.eval(z)));
        assert!(residual < k.error_bound + f.scale.norm() * k1.error_bound, "{text}: {residual}");
    }
}

#[test]
fn limit_geometry_is_continuous_in_the_system() {
    let base = quadratic_default();
    let t = tail(&base, "(a)");
    let k0 = limit_geometry(&base, &t, 1e-12).unwrap();
    let grid = evaluation_grid(&base.piece(Letter(0)));
    let mut slopes = Vec::new();
    for delta in [1e-6, 1e-5, 1e-4] {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let sys = base.perturbed(&mut rng, delta).unwrap();
        let k = limit_geometry(&sys, &t, 1e-12).unwrap();
        slopes.push(sup_distance(&grid, |z| k.eval(z), |z| k0.eval(z)) / delta);
    }
    let hi = slopes.iter().cloned().fold(0.0, f64::max);
    let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi > 0.0 && hi <= 2.0 * lo, "{slopes:?}");
}

#[test]
fn export_round_trips_through_json() {
    let sys = quadratic_default();
    let k = limit_geometry(&sys, &tail(&sys, "(ab)"), 1e-8).unwrap();
    let ex = k.export(&sys);
    assert_eq!(ex.block, vec!["a", "b"]);
    assert_eq!(ex.samples.len(), evaluation_grid(&sys.piece(k.letter)).len());
    let text = serde_json::to_string(&ex).unwrap();
    assert_eq!(serde_json::from_str::<LimitGeometryExport>(&text).unwrap(), ex);
    assert!(ex.fitted_eta.unwrap() < 1.0);
}

#[test]
fn nonconvergence_is_reported() {
    let sys = quadratic_default();
    let err = limit_geometry_with(&sys, &tail(&sys, "(a)"), 1e-30, 5).unwrap_err();
    assert!(matches!(err, cantorlab::Error::NoConvergence { max_depth: 5, ref diffs } if diffs.len() == 5));
}
