//! Intersections of configured Cantor sets through depth-n disk covers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::expr::{uniform_in_disk, MapExpr};
use crate::limit::{compose_exprs, AffineMapC, Configuration};
use crate::system::{CantorSystem, CoverPiece, Letter, DEFAULT_WORD_CAP};

/// Default relative overlap required of a robust witness.
pub const DEFAULT_MARGIN: f64 = 0.05;
/// Default cap on disk pairs visited by one intersection test.
pub const DEFAULT_PAIR_CAP: usize = 20_000_000;
/// Relative tolerance under which touching disks count as intersecting.
const TOUCH_SLACK: f64 = 1e-12;

/// A Cantor set `K(letter)` placed in the plane by a configuration of `G(letter)`.
#[derive(Debug, Clone)]
pub struct ConfiguredSet {
    pub system: CantorSystem,
    pub letter: Letter,
    pub config: Configuration,
}

impl ConfiguredSet {
    pub fn new(system: CantorSystem, config: Configuration) -> Result<ConfiguredSet> {
        config.check(&system)?;
        Ok(ConfiguredSet { letter: config.letter, system, config })
    }

    pub fn identity(system: CantorSystem, letter: Letter) -> ConfiguredSet {
        ConfiguredSet { system, letter, config: Configuration::identity(letter) }
    }

    /// Post-compose the configuration with an affine map.
    pub fn moved(&self, a: AffineMapC) -> ConfiguredSet {
        let map = compose_exprs(self.config.map.clone(), a.to_expr());
        ConfiguredSet { system: self.system.clone(), letter: self.letter, config: Configuration::new(self.letter, map) }
    }

    pub fn translated(&self, t: Complex64) -> ConfiguredSet {
        self.moved(AffineMapC { scale: Complex64::new(1.0, 0.0), offset: t })
    }

    fn affine_config(&self) -> Option<AffineMapC> {
        if self.system.is_affine() {
            self.config.as_affine()
        } else {
            None
        }
    }

    /// Disk enclosing the configured image of a domain cover piece.
    fn image_of(&self, fast: Option<AffineMapC>, piece: &Disk) -> Disk {
        match fast {
            Some(a) => Disk::new(a.apply(piece.center), a.scale.norm() * piece.radius),
            None => self.config.map.image_enclosure(piece),
        }
    }

    pub fn root(&self) -> Node {
        let piece = self.system.root_piece(self.letter);
        let image = self.image_of(self.affine_config(), &piece.disk);
        Node { piece, image }
    }

    pub fn children(&self, node: &Node) -> Vec<Node> {
        let fast = self.affine_config();
        self.system
            .refine(&node.piece)
            .into_iter()
            .map(|piece| {
                let image = self.image_of(fast, &piece.disk);
                Node { piece, image }
            })
            .collect()
    }

    /// A copy with branch coefficients and the configuration's affine part perturbed.
    pub fn perturbed(&self, rng: &mut ChaCha8Rng, branch_eps: f64, config_eps: f64) -> Result<ConfiguredSet> {
        let system = self.system.perturbed(rng, branch_eps)?;
        let map = if config_eps == 0.0 {
            self.config.map.clone()
        } else if let Some(a) = self.config.as_affine() {
            MapExpr::affine(a.scale + uniform_in_disk(rng, config_eps), a.offset + uniform_in_disk(rng, config_eps))
        } else {
            let u1 = uniform_in_disk(rng, config_eps);
            let u2 = uniform_in_disk(rng, config_eps);
            compose_exprs(self.config.map.clone(), MapExpr::affine(Complex64::new(1.0, 0.0) + u1, u2))
        };
        Ok(ConfiguredSet { system, letter: self.letter, config: Configuration::new(self.letter, map) })
    }
}

/// A domain cover piece with the disk enclosing its configured image.
#[derive(Debug, Clone)]
pub struct Node {
    pub piece: CoverPiece,
    pub image: Disk,
}

/// Disks enclosing `config(f_word(G(last)))` for every word of the given depth.
pub fn image_cover(cs: &ConfiguredSet, depth: usize) -> Result<Vec<Disk>> {
    image_cover_capped(cs, depth, DEFAULT_WORD_CAP)
}

pub fn image_cover_capped(cs: &ConfiguredSet, depth: usize, cap: usize) -> Result<Vec<Disk>> {
    let cover = cs.system.cover_at_depth(cs.letter, depth, cap)?;
    let fast = cs.affine_config();
    Ok(cover.iter().map(|p| cs.image_of(fast, &p.disk)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntersectionVerdict {
    /// Every pair of cover disks is disjoint at `depth`.
    CertifiedEmpty { depth: usize },
    /// A chain of overlapping pairs reaches `depth` with relative overlap `margin`.
    RobustNonempty { witness: Complex64, margin: f64, depth: usize },
    /// Overlapping pairs survive to `depth` but none with the requested margin.
    Unknown { depth: usize },
}

impl IntersectionVerdict {
    pub fn depth(&self) -> usize {
        match self {
            IntersectionVerdict::CertifiedEmpty { depth }
            | IntersectionVerdict::RobustNonempty { depth, .. }
            | IntersectionVerdict::Unknown { depth } => *depth,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IntersectionVerdict::CertifiedEmpty { .. })
    }

    pub fn is_robust(&self) -> bool {
        matches!(self, IntersectionVerdict::RobustNonempty { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, IntersectionVerdict::Unknown { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            IntersectionVerdict::CertifiedEmpty { .. } => "certified_empty",
            IntersectionVerdict::RobustNonempty { .. } => "robust_nonempty",
            IntersectionVerdict::Unknown { .. } => "unknown",
        }
    }
}

fn touching(a: &Disk, b: &Disk) -> bool {
    a.intersects(b, TOUCH_SLACK * (a.radius + b.radius))
}

pub fn intersection_test(a: &ConfiguredSet, b: &ConfiguredSet, max_depth: usize, margin: f64) -> IntersectionVerdict {
    intersection_test_capped(a, b, max_depth, margin, DEFAULT_PAIR_CAP)
}

/// Depth-first pruning of overlapping cover pairs.
///
/// The verdict is the one a level-by-level sweep would give: empty when no pair survives,
/// robust when some surviving pair at `max_depth` overlaps by at least `margin`, unknown
/// otherwise. Visiting more than `pair_cap` pairs ends the search as unknown.
pub fn intersection_test_capped(
    a: &ConfiguredSet,
    b: &ConfiguredSet,
    max_depth: usize,
    margin: f64,
    pair_cap: usize,
) -> IntersectionVerdict {
    let mut stack = vec![(a.root(), b.root(), 0usize)];
    let mut deepest_alive: Option<usize> = None;
    let mut reached_bottom = false;
    let mut visited = 0usize;
    while let Some((na, nb, depth)) = stack.pop() {
        visited += 1;
        if visited > pair_cap {
            return IntersectionVerdict::Unknown { depth: deepest_alive.unwrap_or(0) };
        }
        if !touching(&na.image, &nb.image) {
            continue;
        }
        deepest_alive = Some(deepest_alive.map_or(depth, |d| d.max(depth)));
        if depth == max_depth {
            let overlap = na.image.relative_overlap(&nb.image);
            if overlap >= margin {
                return IntersectionVerdict::RobustNonempty {
                    witness: na.image.overlap_midpoint(&nb.image),
                    margin: overlap,
                    depth,
                };
            }
            reached_bottom = true;
            continue;
        }
        let ca = a.children(&na);
        let cb = b.children(&nb);
        // push in reverse so the first word pair is explored first
        for x in ca.iter().rev() {
            for y in cb.iter().rev() {
                if touching(&x.image, &y.image) {
                    stack.push((x.clone(), y.clone(), depth + 1));
                }
            }
        }
    }
    match (reached_bottom, deepest_alive) {
        (true, _) => IntersectionVerdict::Unknown { depth: max_depth },
        (false, None) => IntersectionVerdict::CertifiedEmpty { depth: 0 },
        (false, Some(d)) => IntersectionVerdict::CertifiedEmpty { depth: d + 1 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// Radius of the coefficient perturbations of every branch.
    pub branch_eps: f64,
    /// Radius of the perturbations of the configuration's affine part.
    pub config_eps: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFailure {
    pub seed: u64,
    pub verdict: IntersectionVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub pass_fraction: f64,
    pub samples: usize,
    pub rejected: usize,
    pub certified_empty: usize,
    pub unknown: usize,
    pub failures: Vec<ProbeFailure>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.pass_fraction == 1.0
    }
}

/// Draw one perturbed pair, redrawing samples whose systems fail validation.
fn draw_pair(
    a: &ConfiguredSet,
    b: &ConfiguredSet,
    spec: &PerturbationSpec,
    rng: &mut ChaCha8Rng,
    max_redraws: usize,
) -> (Option<(ConfiguredSet, ConfiguredSet)>, usize) {
    let mut rejected = 0;
    while rejected <= max_redraws {
        let pa = a.perturbed(rng, spec.branch_eps, spec.config_eps);
        let pb = b.perturbed(rng, spec.branch_eps, spec.config_eps);
        if let (Ok(pa), Ok(pb)) = (pa, pb) {
            let fresh = spec.branch_eps == 0.0;
            let valid = fresh || (pa.system.validate().all_passed() && pb.system.validate().all_passed());
            if valid && pa.config.check(&pa.system).is_ok() && pb.config.check(&pb.system).is_ok() {
                return (Some((pa, pb)), rejected);
            }
        }
        rejected += 1;
    }
    (None, rejected)
}

/// Monte Carlo surrogate for stable intersection: the fraction of perturbed pairs whose
/// intersection test is robustly nonempty. Sample `i` uses the seed `spec.seed + i`.
pub fn stable_intersection_probe(
    a: &ConfiguredSet,
    b: &ConfiguredSet,
    spec: &PerturbationSpec,
    max_depth: usize,
    margin: f64,
) -> Result<ProbeReport> {
    if spec.samples == 0 || !(spec.branch_eps >= 0.0) || !(spec.config_eps >= 0.0) {
        return Err(Error::InvalidArgument("probe needs samples > 0 and nonnegative radii".into()));
    }
    let budget = 10 * spec.samples;
    let outcomes: Vec<(u64, Option<IntersectionVerdict>, usize)> = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let seed = spec.seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match draw_pair(a, b, spec, &mut rng, budget) {
                (Some((pa, pb)), rej) => (seed, Some(intersection_test(&pa, &pb, max_depth, margin)), rej),
                (None, rej) => (seed, None, rej),
            }
        })
        .collect();
    let rejected: usize = outcomes.iter().map(|o| o.2).sum();
    let accepted = outcomes.iter().filter(|o| o.1.is_some()).count();
    if rejected > budget || accepted < spec.samples {
        return Err(Error::TooManyRejections { rejected, accepted });
    }
    let mut report = ProbeReport {
        pass_fraction: 0.0,
        samples: spec.samples,
        rejected,
        certified_empty: 0,
        unknown: 0,
        failures: Vec::new(),
    };
    let mut passes = 0;
    for (seed, verdict, _) in outcomes {
        let verdict = verdict.expect("accepted sample has a verdict");
        match verdict {
            IntersectionVerdict::RobustNonempty { .. } => passes += 1,
            IntersectionVerdict::CertifiedEmpty { .. } => report.certified_empty += 1,
            IntersectionVerdict::Unknown { .. } => report.unknown += 1,
        }
        if !verdict.is_robust() {
            report.failures.push(ProbeFailure { seed, verdict });
        }
    }
    report.pass_fraction = passes as f64 / spec.samples as f64;
    Ok(report)
}
