#![allow(dead_code)]

use cantorlab::system::Axiom;
use cantorlab::{CantorSystem, Complex64, Disk, MapExpr, TransitionSet};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ab() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

pub fn affine(s: f64, o: f64) -> MapExpr {
    MapExpr::affine(c(s, 0.0), c(o, 0.0))
}

/// Middle-thirds with the pieces, branches, transitions or base points swapped out.
pub fn thirds_with(pieces: [Disk; 2], branches: [MapExpr; 2], t: TransitionSet, base: Option<Vec<Complex64>>) -> CantorSystem {
    CantorSystem::new(ab(), t, pieces.to_vec(), branches.to_vec(), base).unwrap()
}

pub fn thirds_pieces() -> [Disk; 2] {
    [Disk::new(c(1.0 / 6.0, 0.0), 1.0 / 6.0), Disk::new(c(5.0 / 6.0, 0.0), 1.0 / 6.0)]
}

pub fn thirds_branches() -> [MapExpr; 2] {
    [affine(3.0, 0.0), affine(3.0, -2.0)]
}

/// Six systems, each violating exactly one axiom.
pub fn broken_specs() -> Vec<(Axiom, CantorSystem)> {
    let full = TransitionSet::full(2);
    let overlap = thirds_with(
        [Disk::new(c(-0.8, 0.0), 1.0), Disk::new(c(0.8, 0.0), 1.0)],
        [affine(3.0, 2.4), affine(3.0, -2.4)],
        full.clone(),
        None,
    );
    let weak_cover = thirds_with(thirds_pieces(), [affine(2.5, 0.0), affine(3.0, -2.0)], full.clone(), None);
    let no_aa = thirds_with(thirds_pieces(), thirds_branches(), TransitionSet::from_pairs(2, &[(0, 1), (1, 0), (1, 1)]), None);
    let k = 7f64.sqrt();
    let g = MapExpr::poly(vec![c(-7.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let slow = CantorSystem::new(
        ab(),
        full.clone(),
        vec![Disk::new(c(k, 0.0), 2.2), Disk::new(c(-k, 0.0), 1.5)],
        vec![g.clone(), g],
        None,
    )
    .unwrap();
    let period_two = thirds_with(
        [Disk::new(c(-1.0, 0.0), 0.3), Disk::new(c(1.0, 0.0), 0.3)],
        [affine(3.0, 4.0), affine(3.0, -4.0)],
        TransitionSet::from_pairs(2, &[(0, 1), (1, 0)]),
        None,
    );
    let stray_base = thirds_with(thirds_pieces(), thirds_branches(), full, Some(vec![c(0.2, 0.0), c(1.0, 0.0)]));
    vec![
        (Axiom::Disjointness, overlap),
        (Axiom::Covering, weak_cover),
        (Axiom::Separation, no_aa),
        (Axiom::Expansion, slow),
        (Axiom::Mixing, period_two),
        (Axiom::BasePoints, stray_base),
    ]
}

/// All depth-`depth` cover disks of `K(start)` under the affine configuration `z ↦ s z + o`,
/// computed from the branch coefficients alone.
pub fn brute_force_disks(sys: &CantorSystem, start: cantorlab::Letter, s: Complex64, o: Complex64, depth: usize) -> Vec<Disk> {
    let inv: Vec<(Complex64, Complex64)> = sys
        .letters()
        .map(|a| {
            let (gs, go) = sys.branch(a).as_affine().expect("affine branch");
            (1.0 / gs, -go / gs)
        })
        .collect();
    let mut out = Vec::new();
    // (last letter, scale, offset) of the configuration composed with f_word
    let mut level = vec![(start, s, o)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for &(a, ws, wo) in &level {
            for b in sys.transitions().successors(a) {
                let (fs, fo) = inv[a.index()];
                next.push((b, ws * fs, ws * fo + wo));
            }
        }
        level = next;
    }
    for (a, ws, wo) in level {
        let p = sys.piece(a);
        out.push(Disk::new(ws * p.center + wo, ws.norm() * p.radius));
    }
    out
}

/// Does any pair of disks from the two lists touch (same relative slack as the library)?
pub fn any_pair_touches(xs: &[Disk], ys: &[Disk]) -> bool {
    let mut ys: Vec<Disk> = ys.to_vec();
    ys.sort_by(|p, q| p.center.re.total_cmp(&q.center.re));
    let rmax = ys.iter().map(|d| d.radius).fold(0.0, f64::max);
    let keys: Vec<f64> = ys.iter().map(|d| d.center.re).collect();
    xs.iter().any(|x| {
        let lo = keys.partition_point(|&k| k < x.center.re - x.radius - rmax - 1e-9);
        ys[lo..]
            .iter()
            .take_while(|y| y.center.re <= x.center.re + x.radius + rmax + 1e-9)
            .any(|y| (x.center - y.center).norm() - x.radius - y.radius <= 1e-12 * (x.radius + y.radius))
    })
}

/// Exhaustive `(m, n) ∈ [1, bound]²` scan, with powers built by repeated multiplication.
pub fn exhaustive_pairs(z: Complex64, w: Complex64, v: Complex64, delta: f64, bound: u32) -> Vec<(u32, u32)> {
    let mut zp = vec![c(1.0, 0.0)];
    let mut wp = vec![c(1.0, 0.0)];
    for k in 1..=bound as usize {
        zp.push(zp[k - 1] * z);
        wp.push(wp[k - 1] * w);
    }
    let mut out = Vec::new();
    for m in 1..=bound {
        for n in 1..=bound {
            if (zp[m as usize] * wp[n as usize] - v).norm() < delta {
                out.push((m, n));
            }
        }
    }
    out
}

pub fn generic_instances() -> Vec<(Complex64, Complex64)> {
    vec![
        (Complex64::from_polar(1.2, 1.0), Complex64::from_polar(0.7, 1.41421356)),
        (Complex64::from_polar(1.05, 0.3), Complex64::from_polar(0.95, 2.1)),
        (Complex64::from_polar(1.04, 2.5), Complex64::from_polar(0.96, -0.7)),
        (Complex64::from_polar(1.07, 0.5), Complex64::from_polar(0.94, 3.0)),
        (Complex64::from_polar(1.05, 1.7), Complex64::from_polar(0.95, 0.2)),
    ]
}

pub fn resonant_instances() -> Vec<(Complex64, Complex64)> {
    vec![
        (c(2.0, 0.0), c(0.5, 0.0)),
        (Complex64::from_polar(2.0, 1.0), Complex64::from_polar(0.5, 1.0)),
        (c(3.0, 0.0), c(0.4, 0.0)),
    ]
}
