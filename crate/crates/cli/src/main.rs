//! `cantorlab` command-line experiments.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage or parse error.

mod output;
mod parse;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use cantorlab::catalog;
use cantorlab::intersect::{
    image_cover, intersection_test, stable_intersection_probe, ConfiguredSet, PerturbationSpec, DEFAULT_MARGIN,
};
use cantorlab::kronecker::{find_pairs, genericity_check, pairs_csv, recurrence_gap_of, DEFAULT_COEFF_BOUND, DEFAULT_TOL};
use cantorlab::limit::{limit_geometry_with, AffineMapC, Configuration, DEFAULT_MAX_DEPTH};
use cantorlab::render::{render_cover, render_covers, render_mask};
use cantorlab::unfolding::scan::{density_ladder, density_lower_bound, MIN_GRID_RES};
use cantorlab::unfolding::{builtin_model, UnfoldingModel, BUILTIN_MODELS};
use cantorlab::{CantorSystem, Complex64, Letter, TailSequence};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use output::{Meta, Output};

#[derive(Parser, Debug)]
#[command(name = "cantorlab", version, about = "Experiments on conformal Cantor sets and tangency unfoldings")]
struct Cli {
    /// Directory for the output files; nothing is written without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed, recorded in every output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check the axioms of a system.
    Validate(SystemArg),
    /// Approximate the limit geometry along a tail.
    LimitGeometry(LimitArgs),
    /// Cover-based intersection test of two configured sets.
    Intersect(PairArgs),
    /// Perturbation probe for stable intersection.
    Probe(ProbeArgs),
    /// Genericity check and exponent pairs for `z^m w^n ≈ v`.
    Kronecker(KroneckerArgs),
    /// Tangency-set scans over a ladder of parameter disks.
    Scan(ScanArgs),
    /// Analytic density lower bound at one scale.
    Density(DensityArgs),
}

#[derive(Args, Debug, Serialize)]
struct SystemArg {
    /// System JSON file or built-in name (middle-thirds, quadratic, fat-pair, fat-triangle).
    system: String,
}

#[derive(Args, Debug, Serialize)]
struct LimitArgs {
    system: String,
    /// Tail such as `(a)`, `(ab)` or `(ba)a`.
    #[arg(long)]
    tail: String,
    #[arg(long, default_value_t = 1e-10, value_parser = parse::positive)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Depth of the cover drawn under the limit geometry.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Image side in pixels.
    #[arg(long, default_value_t = 256)]
    size: usize,
}

#[derive(Args, Debug, Serialize)]
struct PairArgs {
    first: String,
    second: String,
    /// Letter of the first set; defaults to the first letter.
    #[arg(long)]
    letter_a: Option<String>,
    #[arg(long)]
    letter_b: Option<String>,
    /// Second set is placed by `z ↦ scale·z + offset`.
    #[arg(long, default_value = "1", value_parser = parse::complex)]
    scale: Complex64,
    #[arg(long, default_value = "0", value_parser = parse::complex)]
    offset: Complex64,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_MARGIN, value_parser = parse::nonnegative)]
    margin: f64,
    /// Depth of the rendered covers, capped by `--depth`.
    #[arg(long, default_value_t = 6)]
    render_depth: usize,
    #[arg(long, default_value_t = 256)]
    size: usize,
}

#[derive(Args, Debug, Serialize)]
struct ProbeArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long, default_value_t = 1e-3, value_parser = parse::nonnegative)]
    branch_eps: f64,
    #[arg(long, default_value_t = 1e-3, value_parser = parse::nonnegative)]
    config_eps: f64,
}

#[derive(Args, Debug, Serialize)]
struct KroneckerArgs {
    #[arg(long, value_parser = parse::complex)]
    z: Complex64,
    #[arg(long, value_parser = parse::complex)]
    w: Complex64,
    #[arg(long, default_value = "1", value_parser = parse::complex)]
    v: Complex64,
    #[arg(long, default_value_t = 0.1, value_parser = parse::positive)]
    delta: f64,
    #[arg(long, default_value_t = 400)]
    m_max: u32,
    #[arg(long, default_value_t = 400)]
    n_max: u32,
    /// Tolerance of the integer-relation search.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse::positive)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_COEFF_BOUND)]
    coeff_bound: i64,
}

#[derive(Args, Debug, Serialize)]
struct BoundArgs {
    /// Target of the selected parameter regions.
    #[arg(long, default_value = "-0.41", value_parser = parse::complex)]
    nu: Complex64,
    /// Radius of the selected regions in the renormalized coordinate.
    #[arg(long, default_value_t = 0.03, value_parser = parse::positive)]
    select_delta: f64,
    /// Tolerance of the exponent-pair search.
    #[arg(long, default_value_t = 0.1, value_parser = parse::positive)]
    kron_delta: f64,
    #[arg(long, default_value_t = 30)]
    m_max: u32,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    /// Model JSON file or built-in name (default, fat-triangle, separated, quadratic).
    model: String,
    #[arg(long, default_value = "2^-3,2^-4,2^-5,2^-6,2^-7", value_parser = parse::eps_ladder)]
    eps_ladder: parse::Ladder,
    /// Cells per side.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Levels beyond the scale-resolving depth.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_MARGIN, value_parser = parse::nonnegative)]
    margin: f64,
    #[command(flatten)]
    bound: BoundArgs,
}

#[derive(Args, Debug, Serialize)]
struct DensityArgs {
    model: String,
    #[arg(long, value_parser = parse::positive)]
    eps: f64,
    #[command(flatten)]
    bound: BoundArgs,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl fmt::Display) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.to_string()))
}

fn lib(e: cantorlab::Error) -> anyhow::Error {
    match e {
        cantorlab::Error::InvalidArgument(_) => usage(e),
        e => e.into(),
    }
}

#[derive(Serialize)]
struct InputRef {
    name: String,
    sha256: Option<String>,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    inputs: &'a [InputRef],
    command: &'a Command,
    seed: u64,
}

/// Loaded inputs, remembered for the config hash.
#[derive(Default)]
struct Inputs(Vec<InputRef>);

impl Inputs {
    fn read(&mut self, arg: &str) -> Result<String> {
        let text = fs::read_to_string(arg).map_err(|e| usage(format!("cannot read `{arg}`: {e}")))?;
        let digest = Sha256::digest(text.as_bytes());
        self.0.push(InputRef { name: arg.to_string(), sha256: Some(digest.iter().map(|b| format!("{b:02x}")).collect()) });
        Ok(text)
    }

    fn system(&mut self, arg: &str) -> Result<CantorSystem> {
        if let Some(sys) = catalog::builtin(arg) {
            self.0.push(InputRef { name: arg.to_string(), sha256: None });
            return Ok(sys);
        }
        let text = self.read(arg)?;
        CantorSystem::from_json(&text).map_err(|e| usage(format!("{arg}: {e}")))
    }

    fn model(&mut self, arg: &str) -> Result<UnfoldingModel> {
        if BUILTIN_MODELS.contains(&arg) {
            self.0.push(InputRef { name: arg.to_string(), sha256: None });
            return Ok(builtin_model(arg).expect("listed built-in"));
        }
        let text = self.read(arg)?;
        let base = Path::new(arg).parent().unwrap_or(Path::new("."));
        UnfoldingModel::from_json(&text, base).map_err(|e| usage(format!("{arg}: {e}")))
    }
}

fn letter_or_first(sys: &CantorSystem, name: &Option<String>) -> Result<Letter> {
    match name {
        Some(n) => sys.letter(n).map_err(usage),
        None => Ok(Letter(0)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut inputs = Inputs::default();
    // inputs are loaded before the output is opened so that the hash covers them
    match &cli.command {
        Command::Validate(a) => {
            let sys = inputs.system(&a.system)?;
            let mut out = open(cli, &inputs)?;
            validate(&sys, &mut out)
        }
        Command::LimitGeometry(a) => {
            let sys = inputs.system(&a.system)?;
            let mut out = open(cli, &inputs)?;
            limit(&sys, a, &mut out)
        }
        Command::Intersect(a) => {
            let (x, y) = configured_pair(&mut inputs, a)?;
            let mut out = open(cli, &inputs)?;
            intersect(&x, &y, a, &mut out)
        }
        Command::Probe(a) => {
            let (x, y) = configured_pair(&mut inputs, &a.pair)?;
            let mut out = open(cli, &inputs)?;
            probe(&x, &y, a, cli.seed, &mut out)
        }
        Command::Kronecker(a) => {
            let mut out = open(cli, &inputs)?;
            kronecker(a, &mut out)
        }
        Command::Scan(a) => {
            if a.grid < MIN_GRID_RES {
                return Err(usage(format!("--grid must be at least {MIN_GRID_RES}")));
            }
            let model = inputs.model(&a.model)?;
            let mut out = open(cli, &inputs)?;
            scan(&model, a, &mut out)
        }
        Command::Density(a) => {
            let model = inputs.model(&a.model)?;
            let mut out = open(cli, &inputs)?;
            density(&model, a, &mut out)
        }
    }
}

fn open(cli: &Cli, inputs: &Inputs) -> Result<Output> {
    let config = RunConfig { inputs: &inputs.0, command: &cli.command, seed: cli.seed };
    Output::new(cli.out.as_deref(), Meta::new(&config, cli.seed))
}

fn validate(sys: &CantorSystem, out: &mut Output) -> Result<ExitCode> {
    let report = sys.validate();
    for c in &report.checks {
        println!("{:<13} {} margin {:+.3e} {}", format!("{:?}", c.axiom).to_lowercase(), if c.passed { "ok  " } else { "FAIL" }, c.margin, c.detail);
    }
    println!("expansion inf {:.6}, primitivity index {:?}", report.expansion_inf, report.primitivity_index);
    out.json("validate.json", &report)?;
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn limit(sys: &CantorSystem, a: &LimitArgs, out: &mut Output) -> Result<ExitCode> {
    let tail = TailSequence::parse(&a.tail, |s| sys.letter(s), sys.transitions()).map_err(|e| usage(format!("tail `{}`: {e}", a.tail)))?;
    let k = limit_geometry_with(sys, &tail, a.tol, a.max_depth).map_err(lib)?;
    let export = k.export(sys);
    println!(
        "depth {} error bound {:.3e} ratio {:.4} fitted η {}",
        k.depth,
        k.error_bound,
        k.ratio,
        export.fitted_eta.map_or("n/a".to_string(), |e| format!("{e:.4}"))
    );
    out.json("limit_geometry.json", &export)?;
    let mut csv = String::from("re,im,k_re,k_im\n");
    for (z, kz) in &export.samples {
        csv += &format!("{:e},{:e},{:e},{:e}\n", z.re, z.im, kz.re, kz.im);
    }
    out.csv("samples.csv", &csv)?;
    if out.dir.is_some() {
        let cs = ConfiguredSet::new(sys.clone(), k.configuration()).map_err(lib)?;
        let disks = image_cover(&cs, a.depth).map_err(lib)?;
        out.ppm("cover.ppm", &render_cover(&disks, a.size))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn configured_pair(inputs: &mut Inputs, a: &PairArgs) -> Result<(ConfiguredSet, ConfiguredSet)> {
    let sa = inputs.system(&a.first)?;
    let sb = inputs.system(&a.second)?;
    let la = letter_or_first(&sa, &a.letter_a)?;
    let lb = letter_or_first(&sb, &a.letter_b)?;
    let map = AffineMapC::new(a.scale, a.offset).map_err(|e| usage(format!("--scale: {e}")))?;
    let x = ConfiguredSet::identity(sa, la);
    let y = ConfiguredSet::new(sb, Configuration::affine(lb, map)).map_err(lib)?;
    Ok((x, y))
}

fn intersect(x: &ConfiguredSet, y: &ConfiguredSet, a: &PairArgs, out: &mut Output) -> Result<ExitCode> {
    let v = intersection_test(x, y, a.depth, a.margin);
    println!("{} at depth {}", v.label(), v.depth());
    out.json("intersect.json", &v)?;
    if out.dir.is_some() {
        let d = a.render_depth.min(a.depth);
        let first = image_cover(x, d).map_err(lib)?;
        let second = image_cover(y, d).map_err(lib)?;
        out.ppm("covers.ppm", &render_covers(&first, &second, a.size))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn probe(x: &ConfiguredSet, y: &ConfiguredSet, a: &ProbeArgs, seed: u64, out: &mut Output) -> Result<ExitCode> {
    let spec = PerturbationSpec { branch_eps: a.branch_eps, config_eps: a.config_eps, samples: a.samples, seed };
    let report = stable_intersection_probe(x, y, &spec, a.pair.depth, a.pair.margin).map_err(lib)?;
    println!(
        "pass fraction {:.4} over {} samples ({} empty, {} unknown, {} rejected)",
        report.pass_fraction, report.samples, report.certified_empty, report.unknown, report.rejected
    );
    out.json("probe.json", &report)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct KroneckerResult<T: Serialize, G: Serialize, P: Serialize> {
    genericity: T,
    pairs_found: usize,
    near_miss: Option<P>,
    m_reach: u32,
    gap: Option<G>,
    gap_note: Option<String>,
}

fn kronecker(a: &KroneckerArgs, out: &mut Output) -> Result<ExitCode> {
    let g = genericity_check(a.z, a.w, a.tol, a.coeff_bound).map_err(lib)?;
    let s = find_pairs(a.z, a.w, a.v, a.delta, a.m_max, a.n_max).map_err(lib)?;
    let (gap, note) = match recurrence_gap_of(&s) {
        Ok(gap) => (Some(gap), None),
        Err(e @ cantorlab::Error::InsufficientPairs { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(lib(e)),
    };
    match &g.verdict {
        cantorlab::kronecker::Genericity::Generic => println!("generic (X = {:.6e})", g.x),
        cantorlab::kronecker::Genericity::Resonant { relation, residual } => {
            println!("resonant: relation {relation:?}, residual {residual:.2e}")
        }
    }
    println!("{} pairs", s.pairs.len());
    match (&gap, &note) {
        (Some(gap), _) => println!("gap M = {} ({} distinct m, bounded: {})", gap.m_gap, gap.distinct_m, gap.bounded),
        (None, Some(n)) => println!("gap: {n}"),
        _ => {}
    }
    out.json(
        "kronecker.json",
        &KroneckerResult { genericity: &g, pairs_found: s.pairs.len(), near_miss: s.near_miss, m_reach: s.m_reach, gap, gap_note: note },
    )?;
    out.csv("pairs.csv", &pairs_csv(&s.pairs))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BoundRow {
    eps: f64,
    fraction: f64,
    bound: Option<f64>,
    selected_value: Option<f64>,
    below_fraction: Option<bool>,
}

#[derive(Serialize)]
struct ScanResult<E: Serialize> {
    estimate: E,
    pairs_found: usize,
    m_gap: Option<u32>,
    bound_note: Option<String>,
    comparison: Vec<BoundRow>,
}

fn scan(model: &UnfoldingModel, a: &ScanArgs, out: &mut Output) -> Result<ExitCode> {
    let est = density_ladder(model, &a.eps_ladder.0, a.grid, a.depth, a.margin).map_err(lib)?;
    let b = &a.bound;
    let mut note = None;
    let mut pairs = Vec::new();
    let mut m_gap = None;
    match model.kronecker_target().and_then(|t| find_pairs(model.lambda_u, model.lambda_s, t.v, b.kron_delta, b.m_max, b.m_max)) {
        Ok(s) => {
            match recurrence_gap_of(&s) {
                Ok(g) => m_gap = Some(g.m_gap),
                Err(e) => note = Some(e.to_string()),
            }
            pairs = s.pairs;
        }
        Err(e) => note = Some(e.to_string()),
    }
    let mut comparison = Vec::new();
    for row in &est.rows {
        let bound = match m_gap {
            Some(m) => Some(density_lower_bound(model, b.nu, b.select_delta, row.eps, &pairs, m).map_err(lib)?),
            None => None,
        };
        comparison.push(BoundRow {
            eps: row.eps,
            fraction: row.fraction,
            bound: bound.as_ref().map(|x| x.value),
            selected_value: bound.as_ref().map(|x| x.selected_value),
            below_fraction: bound.as_ref().map(|x| x.value <= row.fraction),
        });
    }
    let mut csv = String::from("eps,grid,depth,inside,tangent,unknown,empty,fraction,bound\n");
    for (row, c) in est.rows.iter().zip(&comparison) {
        csv += &format!(
            "{:e},{},{},{},{},{},{},{:.6},{}\n",
            row.eps,
            row.grid_res,
            row.depth,
            row.inside,
            row.tangent,
            row.unknown,
            row.empty,
            row.fraction,
            c.bound.map_or(String::new(), |v| format!("{v:.6}"))
        );
        println!(
            "ε {:<10.4e} depth {:>2} fraction {:.4} bound {}",
            row.eps,
            row.depth,
            row.fraction,
            c.bound.map_or("n/a".to_string(), |v| format!("{v:.4}"))
        );
    }
    println!("liminf proxy {:.4}", est.liminf_proxy);
    if let Some(n) = &note {
        println!("no density bound: {n}");
    }
    for (k, row) in est.rows.iter().enumerate() {
        out.ppm(&format!("mask_{k}.ppm"), &render_mask(&row.mask, row.grid_res))?;
    }
    out.csv("fractions.csv", &csv)?;
    out.json("scan.json", &ScanResult { estimate: &est, pairs_found: pairs.len(), m_gap, bound_note: note, comparison })?;
    Ok(ExitCode::SUCCESS)
}

fn density(model: &UnfoldingModel, a: &DensityArgs, out: &mut Output) -> Result<ExitCode> {
    let b = &a.bound;
    let target = model.kronecker_target().map_err(lib)?;
    let s = find_pairs(model.lambda_u, model.lambda_s, target.v, b.kron_delta, b.m_max, b.m_max).map_err(lib)?;
    let gap = recurrence_gap_of(&s).map_err(lib)?;
    let bound = density_lower_bound(model, b.nu, b.select_delta, a.eps, &s.pairs, gap.m_gap).map_err(lib)?;
    println!(
        "bound {:.6e} (selected {:.6e}), m0 {:?}, M {}, {} kept, {} dropped",
        bound.value,
        bound.selected_value,
        bound.m0,
        bound.m_gap,
        bound.kept.len(),
        bound.dropped.len()
    );
    out.json("density.json", &bound).context("writing the bound")?;
    Ok(ExitCode::SUCCESS)
}
