//! Ready-made Cantor systems used by tests, the CLI and the default models.

use num_complex::Complex64;

use crate::disk::Disk;
use crate::expr::MapExpr;
use crate::system::{CantorSystem, TransitionSet};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Complexified middle-thirds set: `G(a) = D(1/6, 1/6)`, `G(b) = D(5/6, 1/6)`,
/// `g = 3z` on `G(a)` and `g = 3z - 2` on `G(b)`.
pub fn middle_thirds() -> CantorSystem {
    CantorSystem::new(
        names(2),
        TransitionSet::full(2),
        vec![Disk::new(c(1.0 / 6.0, 0.0), 1.0 / 6.0), Disk::new(c(5.0 / 6.0, 0.0), 1.0 / 6.0)],
        vec![MapExpr::affine(c(3.0, 0.0), c(0.0, 0.0)), MapExpr::affine(c(3.0, 0.0), c(-2.0, 0.0))],
        None,
    )
    .expect("middle-thirds system is well formed")
}

/// Julia-type Cantor set of `g(z) = z² - k` on the disks `D(±√k, radius)`.
pub fn quadratic(k: Complex64, radius: f64) -> CantorSystem {
    let root = k.sqrt();
    let g = MapExpr::poly(vec![-k, c(0.0, 0.0), c(1.0, 0.0)]);
    CantorSystem::new(
        names(2),
        TransitionSet::full(2),
        vec![Disk::new(root, radius), Disk::new(-root, radius)],
        vec![g.clone(), g],
        None,
    )
    .expect("quadratic system is well formed")
}

/// The default quadratic-branch system, `g(z) = z² - 6` on `D(±√6, 1.2)`.
pub fn quadratic_default() -> CantorSystem {
    quadratic(c(6.0, 0.0), 1.2)
}

/// Two-branch affine set with contraction `rho` and branch images `[0, ρ]`, `[1-ρ, 1]`
/// of the unit interval, carried by disks of radius `radius`.
pub fn fat_pair(rho: f64, radius: f64) -> CantorSystem {
    let ca = rho / 2.0;
    let cb = 1.0 - rho / 2.0;
    CantorSystem::new(
        names(2),
        TransitionSet::full(2),
        vec![Disk::new(c(ca, 0.0), radius), Disk::new(c(cb, 0.0), radius)],
        vec![
            MapExpr::affine(c(1.0 / rho, 0.0), c(0.0, 0.0)),
            MapExpr::affine(c(1.0 / rho, 0.0), c(-(1.0 - rho) / rho, 0.0)),
        ],
        None,
    )
    .expect("fat pair is well formed")
}

/// `fat_pair(0.45, 0.25)`.
pub fn fat_pair_default() -> CantorSystem {
    fat_pair(0.45, 0.25)
}

/// Three-branch affine set `f_i(z) = ρ z + (1 - ρ) v_i` with `v_i` the cube roots of unity.
/// Letter `a` sits at the vertex `1`, which is the fixed point of its branch.
pub fn fat_triangle(rho: f64, radius: f64) -> CantorSystem {
    let vertices: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0)).collect();
    let pieces = vertices.iter().map(|v| Disk::new(v * (1.0 - rho), radius)).collect();
    let branches = vertices
        .iter()
        .map(|v| MapExpr::affine(c(1.0 / rho, 0.0), -(1.0 - rho) / rho * v))
        .collect();
    CantorSystem::new(names(3), TransitionSet::full(3), pieces, branches, None).expect("fat triangle is well formed")
}

/// `fat_triangle(0.45, 0.463)`.
pub fn fat_triangle_default() -> CantorSystem {
    fat_triangle(0.45, 0.463)
}

/// Looks up a built-in system by name.
pub fn builtin(name: &str) -> Option<CantorSystem> {
    match name {
        "middle-thirds" => Some(middle_thirds()),
        "quadratic" => Some(quadratic_default()),
        "fat-pair" => Some(fat_pair_default()),
        "fat-triangle" => Some(fat_triangle_default()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: &[&str] = &["middle-thirds", "quadratic", "fat-pair", "fat-triangle"];
