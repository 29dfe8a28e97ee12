//! Conformal Cantor systems: letters, admissible transitions, disk pieces and
//! the expanding map, together with axiom validation and depth-n covers.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::expr::MapExpr;
use crate::word::Word;

/// Default tolerance for inclusion and disjointness margins.
pub const DEFAULT_SLACK: f64 = 1e-9;
/// Default cap on the number of words a cover may enumerate.
pub const DEFAULT_WORD_CAP: usize = 1 << 22;

const BOUNDARY_SAMPLES: usize = 2048;
const BASE_POINT_DEPTH: usize = 8;
const BASE_POINT_WORD_BUDGET: u128 = 100_000;
const GREEDY_WORD_LEN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub u16);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Admissible pairs as a boolean transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSet {
    n: usize,
    allowed: Vec<bool>,
}

impl TransitionSet {
    pub fn full(n: usize) -> TransitionSet {
        TransitionSet { n, allowed: vec![true; n * n] }
    }

    pub fn from_pairs(n: usize, pairs: &[(u16, u16)]) -> TransitionSet {
        let mut allowed = vec![false; n * n];
        for &(a, b) in pairs {
            allowed[a as usize * n + b as usize] = true;
        }
        TransitionSet { n, allowed }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: Letter, b: Letter) -> bool {
        a.index() < self.n && b.index() < self.n && self.allowed[a.index() * self.n + b.index()]
    }

    pub fn successors(&self, a: Letter) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).filter(move |&b| self.allowed[a.index() * self.n + b]).map(|b| Letter(b as u16))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Letter, Letter)> + '_ {
        (0..self.n * self.n)
            .filter(|&k| self.allowed[k])
            .map(|k| (Letter((k / self.n) as u16), Letter((k % self.n) as u16)))
    }

    /// Every letter has a successor and a predecessor.
    pub fn has_dead_states(&self) -> Option<Letter> {
        (0..self.n).map(|a| Letter(a as u16)).find(|&a| {
            self.successors(a).next().is_none() || !(0..self.n).any(|p| self.allowed[p * self.n + a.index()])
        })
    }

    /// Number of admissible words of `n + 1` letters starting at `a`.
    pub fn word_count(&self, a: Letter, n: usize) -> u128 {
        let mut counts = vec![1u128; self.n];
        for _ in 0..n {
            let next: Vec<u128> = (0..self.n)
                .map(|x| {
                    (0..self.n)
                        .filter(|&y| self.allowed[x * self.n + y])
                        .fold(0u128, |s, y| s.saturating_add(counts[y]))
                })
                .collect();
            counts = next;
        }
        counts[a.index()]
    }
}

/// Result of the topological mixing test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mixing {
    pub mixing: bool,
    /// Smallest `k` with `M^k > 0`, when mixing.
    pub power: Option<usize>,
}

/// Smallest `k ≤ n²` with every entry of `M^k` positive.
pub fn mixing_check(transitions: &TransitionSet) -> Mixing {
    let n = transitions.n;
    if n == 0 {
        return Mixing { mixing: false, power: None };
    }
    let base = &transitions.allowed;
    let mut cur = base.clone();
    for k in 1..=n * n {
        if cur.iter().all(|&x| x) {
            return Mixing { mixing: true, power: Some(k) };
        }
        let mut next = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                next[i * n + j] = (0..n).any(|l| cur[i * n + l] && base[l * n + j]);
            }
        }
        cur = next;
    }
    Mixing { mixing: false, power: None }
}

/// A cover element: an admissible word and a disk enclosing its advanced piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverPiece {
    pub word: Word,
    pub disk: Disk,
}

#[derive(Debug, Clone)]
pub struct CantorSystem {
    names: Vec<String>,
    transitions: TransitionSet,
    pieces: Vec<Disk>,
    branches: Vec<MapExpr>,
    inverses: Vec<MapExpr>,
    /// `(scale, offset)` of every inverse branch when all of them are affine.
    affine_inverses: Option<Vec<(Complex64, Complex64)>>,
    base_points: Vec<Complex64>,
    explicit_base_points: bool,
}

impl CantorSystem {
    /// Build a system; base points default to the fixed point of `g|G(a)` when
    /// `(a, a)` is admissible, otherwise to the end of a greedy admissible word.
    pub fn new(
        names: Vec<String>,
        transitions: TransitionSet,
        pieces: Vec<Disk>,
        branches: Vec<MapExpr>,
        base_points: Option<Vec<Complex64>>,
    ) -> Result<CantorSystem> {
        let n = names.len();
        if n == 0 {
            return Err(Error::MalformedSystem("empty alphabet".into()));
        }
        if transitions.size() != n || pieces.len() != n || branches.len() != n {
            return Err(Error::MalformedSystem("alphabet, transitions, pieces and branches disagree in size".into()));
        }
        if let Some(dead) = transitions.has_dead_states() {
            return Err(Error::MalformedSystem(format!("letter `{}` is a dead state", names[dead.index()])));
        }
        for (i, p) in pieces.iter().enumerate() {
            if !(p.radius > 0.0) || !p.center.is_finite() {
                return Err(Error::MalformedSystem(format!("piece `{}` needs a positive radius", names[i])));
            }
        }
        for b in &branches {
            b.check()?;
        }
        let inverses: Vec<MapExpr> = branches.iter().zip(&pieces).map(|(g, p)| g.inverse_into(p)).collect();
        let affine_inverses = inverses.iter().map(|f| f.as_affine()).collect::<Option<Vec<_>>>();
        let explicit = base_points.is_some();
        let mut sys = CantorSystem {
            names,
            transitions,
            pieces,
            branches,
            inverses,
            affine_inverses,
            base_points: Vec::new(),
            explicit_base_points: explicit,
        };
        sys.base_points = match base_points {
            Some(bp) if bp.len() == n => bp,
            Some(_) => return Err(Error::MalformedSystem("one base point per letter required".into())),
            None => (0..n).map(|a| sys.default_base_point(Letter(a as u16))).collect(),
        };
        Ok(sys)
    }

    pub fn alphabet_len(&self) -> usize {
        self.names.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.names.len()).map(|a| Letter(a as u16))
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.names[a.index()]
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Letter(i as u16))
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn transitions(&self) -> &TransitionSet {
        &self.transitions
    }

    pub fn piece(&self, a: Letter) -> Disk {
        self.pieces[a.index()]
    }

    pub fn branch(&self, a: Letter) -> &MapExpr {
        &self.branches[a.index()]
    }

    pub fn base_point(&self, a: Letter) -> Complex64 {
        self.base_points[a.index()]
    }

    pub fn is_affine(&self) -> bool {
        self.affine_inverses.is_some()
    }

    /// `f_{a,b} = (g|G(a))⁻¹` restricted to `G(b)`.
    pub fn inverse_branch(&self, a: Letter, b: Letter) -> Result<MapExpr> {
        if !self.transitions.contains(a, b) {
            return Err(Error::Inadmissible(self.name(a).into(), self.name(b).into()));
        }
        let f = self.inverses[a.index()].clone();
        let c = self.piece(b).center;
        if !f.eval(c).is_finite() {
            return Err(Error::InversionFailed(format!("{c} for branch `{}`", self.name(a))));
        }
        Ok(f)
    }

    fn inv(&self, a: Letter) -> &MapExpr {
        &self.inverses[a.index()]
    }

    pub fn word(&self, letters: Vec<Letter>) -> Result<Word> {
        Word::new(letters, &self.transitions)
    }

    pub fn word_from_names(&self, names: &[&str]) -> Result<Word> {
        let letters = names.iter().map(|n| self.letter(n)).collect::<Result<Vec<_>>>()?;
        self.word(letters)
    }

    /// `f_word = f_{a0,a1} ∘ … ∘ f_{a(n-1),an}`, mapping `G(an)` into `G(a0)`.
    /// A one-letter word gives the identity.
    pub fn compose_branches(&self, word: &Word) -> Result<MapExpr> {
        let letters = word.letters();
        if letters.len() == 1 {
            return Ok(MapExpr::identity());
        }
        let mut maps = Vec::with_capacity(letters.len() - 1);
        for w in letters.windows(2).rev() {
            maps.push(self.inverse_branch(w[0], w[1])?);
        }
        Ok(if maps.len() == 1 { maps.pop().unwrap() } else { MapExpr::Chain { maps } })
    }

    /// Composite affine map of `f_word`, when the system is affine.
    pub(crate) fn affine_word(&self, letters: &[Letter]) -> Option<(Complex64, Complex64)> {
        let inv = self.affine_inverses.as_ref()?;
        let mut s = Complex64::new(1.0, 0.0);
        let mut o = Complex64::new(0.0, 0.0);
        // f_word = f_{a0} ∘ … ∘ f_{a(n-1)}: apply innermost last
        for a in letters[..letters.len() - 1].iter() {
            let (ls, lo) = inv[a.index()];
            o += s * lo;
            s *= ls;
        }
        Some((s, o))
    }

    /// Disk enclosing `f_word(G(last))`.
    pub fn word_disk(&self, letters: &[Letter]) -> Disk {
        let last = *letters.last().unwrap();
        let piece = self.piece(last);
        if let Some((s, o)) = self.affine_word(letters) {
            return Disk::new(s * piece.center + o, s.norm() * piece.radius);
        }
        let mut d = piece;
        for a in letters[..letters.len() - 1].iter().rev() {
            d = self.inv(*a).image_enclosure(&d);
        }
        d
    }

    /// Children of a cover piece one level deeper, clipped to the parent disk.
    pub fn refine(&self, parent: &CoverPiece) -> Vec<CoverPiece> {
        let letters = parent.word.letters();
        let last = *letters.last().unwrap();
        self.transitions
            .successors(last)
            .map(|b| {
                let mut w = letters.to_vec();
                w.push(b);
                let raw = self.word_disk(&w);
                let disk = if raw.inside(&parent.disk, 1e-12 * parent.disk.radius) {
                    raw
                } else {
                    raw.intersection_hull(&parent.disk).unwrap_or(raw)
                };
                CoverPiece { word: Word::from_trusted(w), disk }
            })
            .collect()
    }

    pub fn root_piece(&self, a: Letter) -> CoverPiece {
        CoverPiece { word: Word::from_trusted(vec![a]), disk: self.piece(a) }
    }

    /// Enclosing disks of all advanced pieces of depth `n` inside `G(a)`.
    pub fn cover_at_depth(&self, a: Letter, n: usize, cap: usize) -> Result<Vec<CoverPiece>> {
        let count = self.transitions.word_count(a, n);
        if count > cap as u128 {
            return Err(Error::CoverCap { depth: n, count, cap });
        }
        let mut level = vec![self.root_piece(a)];
        for _ in 0..n {
            level = level.iter().flat_map(|p| self.refine(p)).collect();
        }
        Ok(level)
    }

    fn default_base_point(&self, a: Letter) -> Complex64 {
        if self.transitions.contains(a, a) {
            if let Some((s, o)) = self.inv(a).as_affine() {
                return o / (1.0 - s);
            }
            let f = self.inv(a);
            let mut z = self.piece(a).center;
            for _ in 0..500 {
                let next = f.eval(z);
                if !next.is_finite() {
                    break;
                }
                let done = (next - z).norm() <= 1e-16 * (1.0 + z.norm());
                z = next;
                if done {
                    break;
                }
            }
            return z;
        }
        let mut letters = vec![a];
        for _ in 0..GREEDY_WORD_LEN {
            let next = self.transitions.successors(*letters.last().unwrap()).next().unwrap();
            letters.push(next);
        }
        let word = Word::from_trusted(letters);
        match self.compose_branches(&word) {
            Ok(f) => f.eval(self.piece(word.last()).center),
            Err(_) => self.piece(a).center,
        }
    }

    /// A copy with every branch coefficient moved by a uniform sample of the `eps`-disk.
    pub fn perturbed<R: Rng>(&self, rng: &mut R, eps: f64) -> Result<CantorSystem> {
        let branches = self.branches.iter().map(|b| b.perturbed(rng, eps)).collect();
        let base = if self.explicit_base_points && eps == 0.0 { Some(self.base_points.clone()) } else { None };
        CantorSystem::new(self.names.clone(), self.transitions.clone(), self.pieces.clone(), branches, base)
    }

    /// The same alphabet, transitions and pieces with new branches; base points are recomputed.
    pub fn with_branches(&self, branches: Vec<MapExpr>) -> Result<CantorSystem> {
        CantorSystem::new(self.names.clone(), self.transitions.clone(), self.pieces.clone(), branches, None)
    }

    /// The mirror system `z ↦ conj z`.
    pub fn conjugated(&self) -> Result<CantorSystem> {
        let pieces = self.pieces.iter().map(|p| Disk::new(p.center.conj(), p.radius)).collect();
        let branches = self.branches.iter().map(|b| b.conjugated()).collect();
        let base = self.explicit_base_points.then(|| self.base_points.iter().map(|c| c.conj()).collect());
        CantorSystem::new(self.names.clone(), self.transitions.clone(), pieces, branches, base)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_system(self, DEFAULT_SLACK)
    }

    pub fn to_doc(&self) -> SystemDoc {
        let name = |a: Letter| self.names[a.index()].clone();
        SystemDoc {
            alphabet: self.names.clone(),
            transitions: self.transitions.pairs().map(|(a, b)| (name(a), name(b))).collect(),
            pieces: self
                .letters()
                .map(|a| (name(a), PieceDoc { center: self.piece(a).center, radius: self.piece(a).radius }))
                .collect(),
            branches: self.letters().map(|a| (name(a), self.branch(a).clone())).collect(),
            base_points: Some(self.letters().map(|a| (name(a), self.base_point(a))).collect()),
        }
    }

    pub fn from_doc(doc: &SystemDoc) -> Result<CantorSystem> {
        let names = doc.alphabet.clone();
        let index = |s: &str| -> Result<u16> {
            names.iter().position(|n| n == s).map(|i| i as u16).ok_or_else(|| Error::UnknownLetter(s.into()))
        };
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(Error::MalformedSystem(format!("duplicate letter `{n}`")));
            }
        }
        let pairs = doc
            .transitions
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let lookup = |what: &str, key: &String| Error::MalformedSystem(format!("missing {what} for letter `{key}`"));
        let pieces = names
            .iter()
            .map(|n| doc.pieces.get(n).map(|p| Disk::new(p.center, p.radius)).ok_or_else(|| lookup("piece", n)))
            .collect::<Result<Vec<_>>>()?;
        let branches = names
            .iter()
            .map(|n| doc.branches.get(n).cloned().ok_or_else(|| lookup("branch", n)))
            .collect::<Result<Vec<_>>>()?;
        for key in doc.pieces.keys().chain(doc.branches.keys()) {
            index(key)?;
        }
        let base = match &doc.base_points {
            Some(bp) => Some(
                names.iter().map(|n| bp.get(n).copied().ok_or_else(|| lookup("base point", n))).collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        CantorSystem::new(names.clone(), TransitionSet::from_pairs(names.len(), &pairs), pieces, branches, base)
    }

    pub fn from_json(text: &str) -> Result<CantorSystem> {
        let doc: SystemDoc = serde_json::from_str(text)?;
        CantorSystem::from_doc(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("system document serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub center: Complex64,
    pub radius: f64,
}

/// JSON form of a [`CantorSystem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub alphabet: Vec<String>,
    pub transitions: Vec<(String, String)>,
    pub pieces: BTreeMap<String, PieceDoc>,
    pub branches: BTreeMap<String, MapExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_points: Option<BTreeMap<String, Complex64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// Pieces pairwise disjoint.
    Disjointness,
    /// `(a,b)` admissible implies `G(b) ⊂ g(G(a))`.
    Covering,
    /// `(a,b)` not admissible implies `G(b) ∩ g(G(a)) = ∅`.
    Separation,
    /// `inf |g'| > 1` on every piece.
    Expansion,
    /// Transition matrix primitive.
    Mixing,
    /// Every base point lies in the depth-n cover of its piece.
    BasePoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Worst margin found; for expansion the infimum of `|g'|` minus one.
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
    pub expansion_inf: f64,
    pub primitivity_index: Option<usize>,
    pub slack: f64,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<Axiom> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.axiom).collect()
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is checked")
    }
}

/// Winding number of a sampled closed curve around `p`, and the distance from `p` to its samples.
fn winding_and_distance(curve: &[Complex64], p: Complex64) -> (i64, f64) {
    let mut total = 0.0;
    let mut dist = f64::INFINITY;
    for i in 0..curve.len() {
        let a = curve[i] - p;
        let b = curve[(i + 1) % curve.len()] - p;
        total += (b / a).arg();
        dist = dist.min(a.norm());
    }
    ((total / std::f64::consts::TAU).round() as i64, dist)
}

/// Check every axiom with the given margin tolerance; failures are reported, never raised.
///
/// Closed disks that touch are not disjoint, so disjointness and separation need a gap
/// above `slack`; inclusions (covering, base points) may be tangent up to `slack`.
pub fn validate_system(sys: &CantorSystem, slack: f64) -> ValidationReport {
    let letters: Vec<Letter> = sys.letters().collect();
    let mut checks = Vec::new();

    let mut worst = f64::INFINITY;
    let mut detail = String::new();
    for (i, &a) in letters.iter().enumerate() {
        for &b in &letters[i + 1..] {
            let gap = sys.piece(a).gap(&sys.piece(b));
            if gap < worst {
                worst = gap;
                detail = format!("G({}) vs G({})", sys.name(a), sys.name(b));
            }
        }
    }
    if letters.len() < 2 {
        worst = f64::INFINITY;
    }
    checks.push(AxiomCheck { axiom: Axiom::Disjointness, passed: worst > slack, margin: worst, detail });

    let mut cover = (f64::INFINITY, String::new(), true);
    let mut sep = (f64::INFINITY, String::new(), true);
    for &a in &letters {
        let image = sys.branch(a).as_affine().map(|(sc, o)| Disk::new(sc * sys.piece(a).center + o, sc.norm() * sys.piece(a).radius));
        let curve: Vec<Complex64> = match image {
            Some(_) => Vec::new(),
            None => sys.piece(a).boundary(BOUNDARY_SAMPLES).map(|z| sys.branch(a).eval(z)).collect(),
        };
        for &b in &letters {
            let target = sys.piece(b);
            // (enclosed, distance from the center of G(b) to the boundary of g(G(a)))
            let (enclosed, dist) = match image {
                Some(img) => {
                    let d = (target.center - img.center).norm();
                    (d < img.radius, (img.radius - d).abs())
                }
                None => {
                    let (wind, dist) = winding_and_distance(&curve, target.center);
                    (wind != 0, dist)
                }
            };
            let margin = dist - target.radius;
            let tag = format!("g(G({})) vs G({})", sys.name(a), sys.name(b));
            if sys.transitions.contains(a, b) {
                if !enclosed {
                    cover.2 = false;
                    cover.0 = cover.0.min(-dist - target.radius);
                    cover.1 = format!("{tag}: not enclosed");
                } else if margin < cover.0 {
                    cover.0 = margin;
                    if cover.2 {
                        cover.1 = tag;
                    }
                }
            } else if enclosed {
                sep.2 = false;
                sep.0 = sep.0.min(-dist - target.radius);
                sep.1 = format!("{tag}: enclosed");
            } else if margin < sep.0 {
                sep.0 = margin;
                if sep.2 {
                    sep.1 = tag;
                }
            }
        }
    }
    checks.push(AxiomCheck { axiom: Axiom::Covering, passed: cover.2 && cover.0 >= -slack, margin: cover.0, detail: cover.1 });
    checks.push(AxiomCheck { axiom: Axiom::Separation, passed: sep.2 && sep.0 > slack, margin: sep.0, detail: sep.1 });

    let mut inf = f64::INFINITY;
    let mut detail = String::new();
    for &a in &letters {
        let (lo, _) = sys.branch(a).deriv_bounds(&sys.piece(a));
        if lo < inf {
            inf = lo;
            detail = format!("inf |g'| on G({})", sys.name(a));
        }
    }
    checks.push(AxiomCheck { axiom: Axiom::Expansion, passed: inf > 1.0, margin: inf - 1.0, detail });

    let mix = mixing_check(&sys.transitions);
    checks.push(AxiomCheck {
        axiom: Axiom::Mixing,
        passed: mix.mixing,
        margin: if mix.mixing { 0.0 } else { -1.0 },
        detail: match mix.power {
            Some(k) => format!("M^{k} > 0"),
            None => "no positive power".into(),
        },
    });

    let mut bp_ok = true;
    let mut bp_margin = f64::INFINITY;
    let mut detail = String::new();
    for &a in &letters {
        let depth = (0..=BASE_POINT_DEPTH)
            .rev()
            .find(|&n| sys.transitions.word_count(a, n) <= BASE_POINT_WORD_BUDGET)
            .unwrap_or(0);
        let c = sys.base_point(a);
        let m = match sys.cover_at_depth(a, depth, usize::MAX) {
            Ok(cover) => cover
                .iter()
                .map(|p| p.disk.radius - (c - p.disk.center).norm())
                .fold(f64::NEG_INFINITY, f64::max),
            Err(_) => f64::NEG_INFINITY,
        };
        if m < bp_margin {
            bp_margin = m;
            detail = format!("c_{} at depth {depth}", sys.name(a));
        }
        if !(m >= -slack) {
            bp_ok = false;
        }
    }
    checks.push(AxiomCheck { axiom: Axiom::BasePoints, passed: bp_ok, margin: bp_margin, detail });

    ValidationReport { checks, expansion_inf: inf, primitivity_index: mix.power, slack }
}
