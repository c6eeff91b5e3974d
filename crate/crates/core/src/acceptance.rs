//! The nine acceptance criteria, shared by the `acceptance` test target and
//! the `selftest` subcommand.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossing::{run_intersection, run_lattice, verify_intersection, verify_lattice};
use crate::error::{Error, Result};
use crate::generators::reduction::sample_families;
use crate::generators::tight::{initial_cover_lp, loads};
use crate::generators::{
    check_reduction, gen_edge_cover_tight, gen_mcst_gap, gen_planar_mincut_gap, random_intersection, random_lattice,
    random_mcst, rng_for, UniformCrossing,
};
use crate::lp::{pin_optimum, LpStats};
use crate::mcst::{drop_round_limit, run, verify_guarantee, GuaranteeReport, McstRun};
use crate::numeric::Rational;
use crate::structures::LatticeVariant;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceOptions {
    pub seed: u64,
    /// Worker threads for the random corpora; results do not depend on it.
    pub jobs: usize,
    pub mcst_instances: usize,
    pub intersection_instances: usize,
    pub lattice_instances: usize,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions {
            seed: 2024,
            jobs: 1,
            mcst_instances: 200,
            intersection_instances: 100,
            lattice_instances: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} {verdict}: {} ({})", self.id, self.title, self.detail)
    }
}

/// Limits on wall time, in seconds.
pub const MCST_CORPUS_SECONDS: f64 = 300.0;
pub const PLANAR_K3_SECONDS: f64 = 120.0;

struct McstOutcome {
    index: u64,
    n: usize,
    result: Result<(McstRun, GuaranteeReport)>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))
}

fn par_map<T: Send>(jobs: usize, count: usize, f: impl Fn(u64) -> T + Sync + Send) -> Result<Vec<T>> {
    Ok(pool(jobs)?.install(|| (0..count as u64).into_par_iter().map(&f).collect()))
}

fn criterion(id: usize, title: &str, start: Instant, passed: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        title: title.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn first_failure<'a>(it: impl IntoIterator<Item = &'a String>) -> String {
    it.into_iter().next().cloned().unwrap_or_default()
}

/// Runs every criterion; one result per criterion, in order.
pub fn run_acceptance(opts: &AcceptanceOptions) -> Result<Vec<CriterionResult>> {
    let mut out = Vec::new();
    let mut stats = LpStats::default();

    // Criteria 1-3: the laminar MCST corpus.
    let start = Instant::now();
    let corpus = par_map(opts.jobs, opts.mcst_instances, |i| {
        let result = random_mcst(&mut rng_for(opts.seed, i)).map(|inst| {
            let n = inst.graph.n();
            let r = run(&inst).and_then(|run| {
                let rep = verify_guarantee(&inst, &run.tree, &run.trace)?;
                Ok((run, rep))
            });
            (n, r)
        });
        match result {
            Ok((n, r)) => McstOutcome { index: i, n, result: r },
            Err(e) => McstOutcome {
                index: i,
                n: 0,
                result: Err(e),
            },
        }
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut c1_bad = Vec::new();
    let mut c2_bad = Vec::new();
    let mut c3_bad = Vec::new();
    let mut max_rounds = 0;
    let mut blocks = 0usize;
    for o in &corpus {
        match &o.result {
            Ok((run, rep)) => {
                stats.merge(&run.lp_stats);
                stats.merge(&rep.lp_stats);
                blocks += rep.blocks_checked;
                max_rounds = max_rounds.max(rep.drop_rounds);
                if !(rep.cost_ok && rep.loads_ok && rep.blocks_ok && rep.consistent) {
                    c1_bad.push(format!("instance {}: {}", o.index, first_failure(&rep.failures)));
                }
                let limit = drop_round_limit(2 * o.n - 1);
                if !(rep.shrink_ok && rep.rounds_ok && rep.drop_rounds <= limit && rep.drop_rounds == run.drop_rounds()) {
                    c3_bad.push(format!("instance {}: {}", o.index, first_failure(&rep.failures)));
                }
            }
            Err(e) => {
                c1_bad.push(format!("instance {}: {e}", o.index));
                c3_bad.push(format!("instance {}: {e}", o.index));
                if e.is_invariant() {
                    c2_bad.push(format!("instance {}: {e}", o.index));
                }
            }
        }
    }
    let slow = elapsed > MCST_CORPUS_SECONDS;
    let mut r1 = criterion(
        1,
        "laminar MCST guarantee",
        start,
        c1_bad.is_empty() && !slow,
        if c1_bad.is_empty() {
            format!(
                "{} instances, {blocks} snapshot blocks, {elapsed:.1}s of {MCST_CORPUS_SECONDS}s",
                corpus.len()
            )
        } else {
            format!("{} failing, first {}", c1_bad.len(), c1_bad[0])
        },
    );
    r1.seconds = elapsed;
    out.push(r1);
    out.push(criterion(
        2,
        "step exhaustiveness",
        start,
        c2_bad.is_empty(),
        if c2_bad.is_empty() {
            format!("no internal invariant failure in {} runs", corpus.len())
        } else {
            format!("{} internal failures, first {}", c2_bad.len(), c2_bad[0])
        },
    ));
    out.push(criterion(
        3,
        "drop-round count",
        start,
        c3_bad.is_empty(),
        if c3_bad.is_empty() {
            format!("every round shrank the family by an eighth, max T = {max_rounds}")
        } else {
            format!("{} failing, first {}", c3_bad.len(), c3_bad[0])
        },
    ));

    // Criterion 4: contra-polymatroid intersection.
    let start = Instant::now();
    let runs = par_map(opts.jobs, opts.intersection_instances, |i| -> Result<(String, LpStats)> {
        let inst = random_intersection(&mut rng_for(opts.seed ^ 0x4, i))?;
        if inst.n() > 10 || inst.delta() > 3 {
            return Ok((format!("instance {i} is outside |E| <= 10, Δ <= 3"), LpStats::default()));
        }
        let run = run_intersection(&inst)?;
        let rep = verify_intersection(&inst, run.solution, &run.initial_objective);
        let msg = if rep.passed() { String::new() } else { format!("instance {i}: {}", first_failure(&rep.failures)) };
        Ok((msg, run.lp_stats))
    })?;
    let mut bad = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok((msg, s)) => {
                stats.merge(&s);
                if !msg.is_empty() {
                    bad.push(msg);
                }
            }
            Err(e) => bad.push(format!("instance {i}: {e}")),
        }
    }
    let tight = (|| -> Result<Option<String>> {
        let inst = gen_edge_cover_tight(1)?;
        let pin = pin_optimum(&initial_cover_lp(&inst))?;
        stats.merge(&pin.lp_stats);
        let half = Rational::new(1, 2);
        if !(pin.pinned() && pin.point.iter().all(|v| *v == half) && pin.auxiliary_solves() == 8) {
            return Ok(Some(format!("tight example not pinned at 1/2: {:?}", pin.ranges)));
        }
        if pin.optimum != Rational::from(2) {
            return Ok(Some(format!("tight example LP optimum {}", pin.optimum)));
        }
        let run = run_intersection(&inst)?;
        stats.merge(&run.lp_stats);
        let l = loads(&inst, run.solution);
        let limits: Vec<Rational> = (0..inst.constraints.len())
            .map(|i| Rational::from(2) * inst.upper(i) + Rational::from(inst.delta()) - Rational::one())
            .collect();
        if l.iter().zip(&limits).any(|(&x, lim)| x != 2 || Rational::from(x) != *lim) {
            return Ok(Some(format!("tight example loads {l:?}, expected 2 = 2b+Δ-1")));
        }
        Ok(None)
    })();
    match tight {
        Ok(Some(m)) => bad.push(m),
        Ok(None) => {}
        Err(e) => bad.push(format!("tight example: {e}")),
    }
    out.push(criterion(
        4,
        "contra-polymatroid intersection",
        start,
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} instances, tight example pinned to 1/2 with 8 auxiliary solves and loads 2",
                opts.intersection_instances
            )
        } else {
            format!("{} failing, first {}", bad.len(), bad[0])
        },
    ));

    // Criterion 5: crossing lattice polyhedra.
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut chain_checks = 0usize;
    let mut with_lower = 0usize;
    for (variant, unit, salt) in [
        (LatticeVariant::General, false, 0x51u64),
        (LatticeVariant::Inclusion, false, 0x52),
        (LatticeVariant::Inclusion, true, 0x53),
    ] {
        let runs = par_map(opts.jobs, opts.lattice_instances, |i| -> Result<(String, LpStats, usize, bool)> {
            let inst = random_lattice(&mut rng_for(opts.seed ^ salt, i), variant, unit)?;
            let lower = inst.constraints.iter().any(|c| c.lower.is_some());
            if inst.n() > 8 || inst.delta() > 2 || (unit && inst.delta() > 1) {
                return Ok((format!("{variant} instance {i} is outside the corpus limits"), LpStats::default(), 0, lower));
            }
            let run = run_lattice(&inst)?;
            let rep = verify_lattice(&inst, run.solution)?;
            let exact = !unit || !rep.max_violation.is_positive();
            let msg = if rep.passed() && exact {
                String::new()
            } else if !exact {
                format!("{variant} unit-Δ instance {i}: violation {}", rep.max_violation)
            } else {
                format!("{variant} instance {i}: {}", first_failure(&rep.failures))
            };
            Ok((msg, run.lp_stats, run.chain_checks.len(), lower))
        })?;
        for (i, r) in runs.into_iter().enumerate() {
            match r {
                Ok((msg, s, c, lower)) => {
                    stats.merge(&s);
                    chain_checks += c;
                    with_lower += usize::from(lower);
                    if !msg.is_empty() {
                        bad.push(msg);
                    }
                }
                Err(e) => bad.push(format!("{variant} instance {i}: {e}")),
            }
        }
    }
    out.push(criterion(
        5,
        "crossing lattice polyhedra",
        start,
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} instances per variant, {with_lower} with lower bounds, {chain_checks} chain checks",
                opts.lattice_instances
            )
        } else {
            format!("{} failing, first {}", bad.len(), bad[0])
        },
    ));

    // Criterion 6: planar min-cut gap.
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut k3_seconds = 0.0;
    for k in [2, 3] {
        let t = Instant::now();
        match gen_planar_mincut_gap(k) {
            Ok(g) => {
                let r = &g.report;
                if !r.passed() {
                    bad.push(format!("k={k}: {}", first_failure(&r.failures)));
                }
                if r.integral_min_violation < Rational::from(k - 1) {
                    bad.push(format!("k={k}: violation {}", r.integral_min_violation));
                }
            }
            Err(e) => bad.push(format!("k={k}: {e}")),
        }
        if k == 3 {
            k3_seconds = t.elapsed().as_secs_f64();
            if k3_seconds > PLANAR_K3_SECONDS {
                bad.push(format!("k=3 took {k3_seconds:.1}s"));
            }
        }
    }
    out.push(criterion(
        6,
        "planar min-cut gap",
        start,
        bad.is_empty(),
        if bad.is_empty() {
            format!("k=2,3 LP-feasible at 1/(2k), every hitting set violates by >= k-1, k=3 in {k3_seconds:.1}s")
        } else {
            bad.join("; ")
        },
    ));

    // Criterion 7: MCST gap.
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for e in [4, 8] {
        match gen_mcst_gap(e) {
            Ok(g) => {
                let r = &g.report;
                if !r.passed() {
                    bad.push(format!("e={e}: {}", first_failure(&r.failures)));
                }
                seen.push(format!(
                    "e={e}: rho={}, {} trees, min violation {}",
                    r.discrepancy.unwrap_or_default(),
                    r.enumerated,
                    r.integral_min_violation
                ));
            }
            Err(err) => bad.push(format!("e={e}: {err}")),
        }
    }
    out.push(criterion(
        7,
        "MCST gap",
        start,
        bad.is_empty(),
        if bad.is_empty() { seen.join(", ") } else { bad.join("; ") },
    ));

    // Criterion 8: reduction gadget.
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut yes = 0;
    let fams = sample_families();
    for (i, fam) in fams.iter().enumerate() {
        match UniformCrossing::new(3, 2, fam.clone()).and_then(|s| check_reduction(&s)) {
            Ok(rep) => {
                if !rep.passed() {
                    bad.push(format!("family {i}: {}", first_failure(&rep.failures)));
                }
                if !(rep.three_per_gadget && rep.fibres_uniform && rep.loads_match) {
                    bad.push(format!("family {i}: gadget structure broken"));
                }
                if rep.feasible_basis.is_some() {
                    yes += 1;
                    if rep.yes_tree_special_load != Some(2 * 3 - 2) || !rep.yes_tree_feasible {
                        bad.push(format!("family {i}: yes tree misses the special bound"));
                    }
                }
            }
            Err(e) => bad.push(format!("family {i}: {e}")),
        }
    }
    out.push(criterion(
        8,
        "reduction gadget",
        start,
        bad.is_empty() && yes > 0 && yes < fams.len(),
        if bad.is_empty() {
            format!("{} families ({yes} yes, {} no), 64 trees each", fams.len(), fams.len() - yes)
        } else {
            bad.join("; ")
        },
    ));

    // Criterion 9: LP vertex certification across everything above.
    let start = Instant::now();
    out.push(criterion(
        9,
        "LP vertex certification",
        start,
        stats.all_ok() && stats.solves > 0,
        format!(
            "{} vertices, {} rank-certified, {} clean on full separation",
            stats.solves, stats.certified, stats.separation_clean
        ),
    ));
    Ok(out)
}
