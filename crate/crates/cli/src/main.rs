use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crossrelax::acceptance::{run_acceptance, AcceptanceOptions};
use crossrelax::bits::bit;
use crossrelax::crossing::{intersection_lp_optimum, lattice_lp_optimum};
use crossrelax::generators::{
    check_reduction, gen_edge_cover_tight, gen_mcst_gap, gen_planar_mincut_gap, initial_cover_lp, random_intersection,
    random_lattice, random_mcst, rng_for, UniformCrossing,
};
use crossrelax::lp::pin_optimum;
use crossrelax::mcst::{from_json_lines, solve_state, McstState, TraceEvent};
use crossrelax::report::{intersection_report, lattice_report, mcst_report, solve_instance, Report};
use crossrelax::structures::io::{decode, encode, to_canonical_json};
use crossrelax::structures::{AnyInstance, LatticeVariant};
use crossrelax::{Error, Rational, Result};

#[derive(Parser)]
#[command(name = "crossrelax", version, about = "Iterative relaxation for degree-bounded trees and crossing constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Laminar minimum-cost degree-bounded spanning tree.
    SolveMcst(SolveArgs),
    /// Intersection of two contra-polymatroids with crossing upper bounds.
    SolveIntersection(SolveArgs),
    /// Crossing lattice polyhedron.
    SolveLattice {
        #[command(flatten)]
        common: SolveArgs,
        /// Overrides the variant stored in the instance.
        #[arg(long, value_enum)]
        variant: Option<Variant>,
    },
    /// Writes a generated instance and its report.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Re-solves instances, or re-checks a given solution, with the full verifiers.
    Verify(VerifyArgs),
    /// Runs the built-in acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// JSON results file; defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Instance JSON; `-` or absent reads standard input.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Report JSON; defaults to standard output.
    #[arg(long, visible_alias = "report")]
    out: Option<PathBuf>,
    /// Writes the step trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Runs the full verifier and exits 1 if any check fails.
    #[arg(long)]
    verify: bool,
    /// Records wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance files; `-` reads standard input.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    /// A report whose solution is re-checked instead of solving.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// MCST trace matching `--solution`.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, visible_alias = "report")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenOut {
    /// Instance JSON; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generator report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Degree-bounded tree gap family on `e` gadgets.
    McstGap {
        #[arg(long, default_value_t = 4)]
        e: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Planar s-t path lattice with `k` segments.
    PlanarGap {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Bipartite edge cover on a `4n`-cycle.
    EdgeCover {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Uniform-matroid crossing bounds reduced to a degree-bounded tree.
    Reduction {
        #[arg(long, default_value_t = 3)]
        e: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// `i,j,...:b` bounds `|B ∩ {i,j,...}| <= b`; repeatable.
        #[arg(long = "bound")]
        bounds: Vec<String>,
        #[command(flatten)]
        out: GenOut,
    },
    /// Seeded random instance.
    Random {
        #[arg(long, value_enum)]
        kind: RandomKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, value_enum, default_value_t = Variant::General)]
        variant: Variant,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    Mcst,
    Intersection,
    Lattice,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    General,
    Inclusion,
}

impl From<Variant> for LatticeVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::General => LatticeVariant::General,
            Variant::Inclusion => LatticeVariant::Inclusion,
        }
    }
}

enum Failure {
    Checks,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

fn read_text(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text)?,
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    write_text(path, &to_canonical_json(value))
}

fn wrong_kind(want: &str, got: &AnyInstance) -> Error {
    Error::Instance(format!("expected a {want} instance, got {}", got.kind()))
}

/// Solves one instance and builds its report.
fn solve(inst: &AnyInstance, trace: Option<&Path>, full: bool, variant: Option<Variant>) -> Result<Report> {
    let mut inst = inst.clone();
    if let (AnyInstance::Lattice(l), Some(v)) = (&mut inst, variant) {
        l.variant = v.into();
        l.check_variant()?;
    }
    let solved = solve_instance(&inst, full)?;
    let mut rep = solved.report;
    if let Some(p) = trace {
        std::fs::write(p, solved.trace)?;
        rep.trace = Some(p.display().to_string());
    }
    Ok(rep)
}

fn cmd_solve(args: &SolveArgs, want: &str, variant: Option<Variant>) -> std::result::Result<(), Failure> {
    let inst = decode(&read_text(args.input.as_deref())?)?;
    if inst.kind() != want {
        return Err(wrong_kind(want, &inst).into());
    }
    let start = Instant::now();
    let mut rep = solve(&inst, args.trace.as_deref(), args.verify, variant)?;
    if args.timing {
        rep.timing_seconds = Some(start.elapsed().as_secs_f64());
    }
    write_json(args.out.as_deref(), &rep)?;
    if args.verify && !rep.passed() {
        for c in rep.failed_checks() {
            eprintln!("check {} failed: achieved {} against {}", c.name, c.achieved.exact, c.bound.exact);
        }
        return Err(Failure::Checks);
    }
    Ok(())
}

/// Re-checks a reported solution against a fresh LP optimum.
fn recheck(inst: &AnyInstance, given: &Report, trace: Option<&[TraceEvent]>) -> Result<Report> {
    let sol = &given.outcome.solution;
    let mask = sol.iter().try_fold(0u64, |m, &i| if i < 64 { Ok(m | bit(i)) } else { Err(Error::Instance(format!("element {i} out of range"))) })?;
    let mut rep = match inst {
        AnyInstance::Mcst(m) => {
            let lp = solve_state(&McstState::initial(m), &m.graph, true)?;
            mcst_report(m, sol, lp.objective(), trace, true)?
        }
        AnyInstance::Intersection(c) => {
            let lp = intersection_lp_optimum(c)?;
            intersection_report(c, mask, lp.objective(), true)
        }
        AnyInstance::Lattice(l) => {
            let lp = lattice_lp_optimum(l)?;
            lattice_report(l, mask, lp.objective(), true)?
        }
        AnyInstance::GeneralMcst(_) => return Err(Error::Instance("no verifier for general-bound tree instances".into())),
    };
    if rep.instance_digest != given.instance_digest {
        return Err(Error::Instance(format!(
            "report digest {} does not match instance {}",
            given.instance_digest, rep.instance_digest
        )));
    }
    rep.trace = given.trace.clone();
    Ok(rep)
}

fn cmd_verify(args: &VerifyArgs) -> std::result::Result<(), Failure> {
    if args.solution.is_some() && args.inputs.len() != 1 {
        return Err(Error::Instance("--solution needs exactly one --in".into()).into());
    }
    let texts: Vec<String> = args.inputs.iter().map(|p| read_text(Some(p))).collect::<Result<_>>()?;
    let insts: Vec<AnyInstance> = texts.iter().map(|t| decode(t)).collect::<Result<_>>()?;
    let reports: Vec<Report> = if let Some(sol) = &args.solution {
        let given: Report = serde_json::from_str(&read_text(Some(sol))?).map_err(|e| Error::Instance(format!("bad report: {e}")))?;
        let trace = match &args.trace {
            Some(p) => Some(from_json_lines(&read_text(Some(p))?)?),
            None => None,
        };
        vec![recheck(&insts[0], &given, trace.as_deref())?]
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs.max(1))
            .build()
            .map_err(|e| Error::Instance(format!("thread pool: {e}")))?;
        pool.install(|| insts.par_iter().map(|i| solve(i, None, true, None)).collect::<Result<_>>())?
    };
    write_json(args.out.as_deref(), &reports)?;
    let mut ok = true;
    for (path, rep) in args.inputs.iter().zip(&reports) {
        for c in rep.failed_checks() {
            ok = false;
            eprintln!("{}: check {} failed: achieved {} against {}", path.display(), c.name, c.achieved.exact, c.bound.exact);
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn parse_bound(s: &str) -> Result<(u64, i64)> {
    let bad = || Error::Instance(format!("bound `{s}` is not of the form i,j,...:b"));
    let (set, b) = s.split_once(':').ok_or_else(bad)?;
    let mut mask = 0u64;
    for part in set.split(',').filter(|p| !p.is_empty()) {
        let i: usize = part.trim().parse().map_err(|_| bad())?;
        if i >= 64 {
            return Err(bad());
        }
        mask |= bit(i);
    }
    Ok((mask, b.trim().parse().map_err(|_| bad())?))
}

fn emit<T: Serialize>(inst: AnyInstance, out: &GenOut, report: Option<&T>, passed: bool) -> std::result::Result<(), Failure> {
    write_text(out.out.as_deref(), &encode(&inst))?;
    if let (Some(path), Some(r)) = (&out.report, report) {
        write_json(Some(path), r)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

#[derive(Serialize)]
struct EdgeCoverReport {
    n: usize,
    lp_optimum: Rational,
    pinned: bool,
    auxiliary_solves: usize,
    point: Vec<Rational>,
}

fn cmd_gen(kind: &GenKind) -> std::result::Result<(), Failure> {
    match kind {
        GenKind::McstGap { e, out } => {
            let g = gen_mcst_gap(*e)?;
            let ok = g.report.passed();
            emit(AnyInstance::GeneralMcst(g.instance), out, Some(&g.report), ok)
        }
        GenKind::PlanarGap { k, out } => {
            let g = gen_planar_mincut_gap(*k)?;
            let ok = g.report.passed();
            emit(AnyInstance::Lattice(g.instance), out, Some(&g.report), ok)
        }
        GenKind::EdgeCover { n, out } => {
            let inst = gen_edge_cover_tight(*n)?;
            let pin = pin_optimum(&initial_cover_lp(&inst))?;
            let rep = EdgeCoverReport {
                n: *n,
                lp_optimum: pin.optimum.clone(),
                pinned: pin.pinned(),
                auxiliary_solves: pin.auxiliary_solves(),
                point: pin.point.clone(),
            };
            emit(AnyInstance::Intersection(inst), out, Some(&rep), pin.pinned())
        }
        GenKind::Reduction { e, t, bounds, out } => {
            let bounds = bounds.iter().map(|b| parse_bound(b)).collect::<Result<Vec<_>>>()?;
            let src = UniformCrossing::new(*e, *t, bounds)?;
            let inst = crossrelax::generators::reduce_uniform_crossing_to_mcst(&src)?;
            let rep = check_reduction(&src)?;
            let ok = rep.passed();
            emit(AnyInstance::GeneralMcst(inst), out, Some(&rep), ok)
        }
        GenKind::Random {
            kind,
            seed,
            index,
            variant,
            out,
        } => {
            let mut rng = rng_for(*seed, *index);
            let inst = match kind {
                RandomKind::Mcst => AnyInstance::Mcst(random_mcst(&mut rng)?),
                RandomKind::Intersection => AnyInstance::Intersection(random_intersection(&mut rng)?),
                RandomKind::Lattice => AnyInstance::Lattice(random_lattice(&mut rng, (*variant).into(), false)?),
            };
            emit::<()>(inst, out, None, true)
        }
    }
}

fn cmd_selftest(seed: u64, jobs: usize, out: Option<&Path>) -> std::result::Result<(), Failure> {
    let opts = AcceptanceOptions {
        seed,
        jobs,
        ..AcceptanceOptions::default()
    };
    let results = run_acceptance(&opts)?;
    for r in &results {
        eprintln!("{r}");
    }
    write_json(out, &results)?;
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::SolveMcst(a) => cmd_solve(a, "mcst", None),
        Command::SolveIntersection(a) => cmd_solve(a, "intersection", None),
        Command::SolveLattice { common, variant } => cmd_solve(common, "lattice", *variant),
        Command::Gen { kind } => cmd_gen(kind),
        Command::Verify(a) => cmd_verify(a),
        Command::Selftest { seed, jobs, out } => cmd_selftest(*seed, *jobs, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
