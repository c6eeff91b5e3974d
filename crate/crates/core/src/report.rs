//! Machine-readable solve reports.
//!
//! Every achieved value is recomputed from the returned solution and the
//! instance; nothing is copied out of solver state except the LP optimum.

use serde::{Deserialize, Serialize};

use crate::bits::{bits, count};
use crate::crossing::{run_intersection, run_lattice, verify_intersection, verify_lattice};
use crate::error::{Error, Result};
use crate::mcst::{run, to_json_lines, verify_guarantee, TraceEvent, ALPHA};
use crate::numeric::Rational;
use crate::structures::io::{digest, to_canonical_line, SCHEMA};
use crate::structures::{AnyInstance, IntersectionInstance, LatticeInstance, LatticeVariant, McstInstance};

/// A rational as `"p/q"` with a float rendering for humans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Num {
    pub exact: Rational,
    /// Non-authoritative.
    pub decimal: f64,
}

impl From<&Rational> for Num {
    fn from(r: &Rational) -> Self {
        Num {
            exact: r.clone(),
            decimal: r.to_f64(),
        }
    }
}

impl From<Rational> for Num {
    fn from(r: Rational) -> Self {
        Num::from(&r)
    }
}

/// How a check compares `achieved` with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    AtMost,
    AtLeast,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub sense: Sense,
    pub bound: Num,
    pub achieved: Num,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, sense: Sense, bound: Rational, achieved: Rational) -> Self {
        let pass = match sense {
            Sense::AtMost => achieved <= bound,
            Sense::AtLeast => achieved >= bound,
            Sense::Equal => achieved == bound,
        };
        Check {
            name: name.into(),
            sense,
            bound: bound.into(),
            achieved: achieved.into(),
            pass,
        }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, Sense::Equal, Rational::one(), Rational::from(ok as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Edge or element indices, ascending.
    pub solution: Vec<usize>,
    pub cost: Num,
    pub lp_optimum: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub instance_digest: String,
    pub algorithm: String,
    pub variant: Option<String>,
    pub outcome: Outcome,
    pub checks: Vec<Check>,
    pub timing_seconds: Option<f64>,
    pub trace: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn base(inst: &AnyInstance, algorithm: &str, variant: Option<String>, solution: Vec<usize>, cost: Rational, lp: &Rational) -> Report {
    Report {
        schema: SCHEMA,
        instance_digest: digest(inst),
        algorithm: algorithm.into(),
        variant,
        outcome: Outcome {
            solution,
            cost: cost.into(),
            lp_optimum: lp.into(),
        },
        checks: Vec::new(),
        timing_seconds: None,
        trace: None,
    }
}

/// Report for a laminar MCST tree. With a trace the number of drop rounds
/// `T` sets the additive allowance `4αT`; without one only the cost and
/// tree checks can be made. `full` adds the block-by-block verifier.
pub fn mcst_report(
    inst: &McstInstance,
    tree: &[usize],
    lp_optimum: &Rational,
    trace: Option<&[TraceEvent]>,
    full: bool,
) -> Result<Report> {
    let any = AnyInstance::Mcst(inst.clone());
    let mut tree = tree.to_vec();
    tree.sort_unstable();
    let cost = inst.graph.cost_of(&tree);
    let mut rep = base(&any, "mcst", None, tree.clone(), cost.clone(), lp_optimum);
    rep.checks.push(Check::flag("spanning_tree", inst.graph.is_spanning_tree(&tree)));
    rep.checks.push(Check::new("cost_vs_lp", Sense::AtMost, lp_optimum.clone(), cost));
    let rounds = trace.map(|t| t.iter().filter(|e| e.is_drop()).count());
    for (i, (set, b)) in inst.sets().into_iter().enumerate() {
        let load = Rational::from(inst.graph.cut_load(&tree, set));
        let limit = match rounds {
            Some(t) => &b + &Rational::from(4 * ALPHA * t),
            None => continue,
        };
        rep.checks.push(Check::new(format!("degree_set_{i}"), Sense::AtMost, limit, load));
    }
    if let (Some(t), true) = (trace, full) {
        let g = verify_guarantee(inst, &tree, t)?;
        rep.checks.push(Check::new(
            "guarantee_verifier_failures",
            Sense::AtMost,
            Rational::zero(),
            Rational::from(g.failures.len()),
        ));
        rep.checks.push(Check::new(
            "drop_rounds",
            Sense::AtMost,
            Rational::from(g.round_limit),
            Rational::from(g.drop_rounds),
        ));
    }
    Ok(rep)
}

/// Report for a contra-polymatroid intersection solution: coverage,
/// `|I ∩ E_i| <= 2 b_i + Δ - 1` and `cost <= 2 LP`.
pub fn intersection_report(inst: &IntersectionInstance, solution: u64, lp_optimum: &Rational, full: bool) -> Report {
    let any = AnyInstance::Intersection(inst.clone());
    let cost = inst.cost_of(solution);
    let mut rep = base(&any, "intersection", None, bits(solution).collect(), cost.clone(), lp_optimum);
    rep.checks.push(Check::flag("covers_r1_and_r2", inst.pair.covers(solution)));
    let delta = Rational::from(inst.delta());
    for i in 0..inst.constraints.len() {
        let limit = Rational::from(2) * inst.upper(i) + &delta - Rational::one();
        let load = Rational::from(count(solution & inst.constraints[i].elements));
        rep.checks.push(Check::new(format!("constraint_{i}"), Sense::AtMost, limit, load));
    }
    rep.checks.push(Check::new("cost_vs_2lp", Sense::AtMost, Rational::from(2) * lp_optimum, cost));
    if full {
        let v = verify_intersection(inst, solution, lp_optimum);
        rep.checks.push(Check::new(
            "verifier_failures",
            Sense::AtMost,
            Rational::zero(),
            Rational::from(v.failures.len()),
        ));
    }
    rep
}

/// Report for a lattice solution: coverage, per-constraint violation within
/// `2Δ - 1` (general) or `Δ - 1` (inclusion), and `cost <= LP`.
pub fn lattice_report(inst: &LatticeInstance, solution: u64, lp_optimum: &Rational, full: bool) -> Result<Report> {
    let any = AnyInstance::Lattice(inst.clone());
    let cost = inst.cost_of(solution);
    let mut rep = base(
        &any,
        "lattice",
        Some(inst.variant.to_string()),
        bits(solution).collect(),
        cost.clone(),
        lp_optimum,
    );
    rep.checks.push(Check::flag("covers_rank", inst.covers(solution)));
    let delta = inst.delta() as i64;
    let allowed = Rational::from(match inst.variant {
        LatticeVariant::General => 2 * delta - 1,
        LatticeVariant::Inclusion => delta - 1,
    });
    for (i, c) in inst.constraints.iter().enumerate() {
        let load = Rational::from(count(solution & c.elements));
        if let Some(b) = &c.upper {
            rep.checks.push(Check::new(format!("constraint_{i}_upper"), Sense::AtMost, b + &allowed, load.clone()));
        }
        if let Some(a) = &c.lower {
            rep.checks.push(Check::new(format!("constraint_{i}_lower"), Sense::AtLeast, a - &allowed, load));
        }
    }
    rep.checks.push(Check::new("cost_vs_lp", Sense::AtMost, lp_optimum.clone(), cost));
    if full {
        let v = verify_lattice(inst, solution)?;
        rep.checks.push(Check::new(
            "verifier_failures",
            Sense::AtMost,
            Rational::zero(),
            Rational::from(v.failures.len()),
        ));
    }
    Ok(rep)
}

/// A solved instance: its report and the step trace as JSON lines.
#[derive(Debug, Clone)]
pub struct Solved {
    pub report: Report,
    pub trace: String,
}

fn lines<T: Serialize>(events: &[T]) -> String {
    events.iter().map(|e| to_canonical_line(e) + "\n").collect()
}

/// Runs the matching algorithm on `inst` and reports on its output. `full`
/// adds the exhaustive verifiers.
pub fn solve_instance(inst: &AnyInstance, full: bool) -> Result<Solved> {
    match inst {
        AnyInstance::Mcst(m) => {
            let out = run(m)?;
            Ok(Solved {
                report: mcst_report(m, &out.tree, &out.initial_objective, Some(&out.trace), full)?,
                trace: to_json_lines(&out.trace)?,
            })
        }
        AnyInstance::Intersection(c) => {
            let out = run_intersection(c)?;
            Ok(Solved {
                report: intersection_report(c, out.solution, &out.initial_objective, full),
                trace: lines(&out.trace),
            })
        }
        AnyInstance::Lattice(l) => {
            let out = run_lattice(l)?;
            Ok(Solved {
                report: lattice_report(l, out.solution, &out.initial_objective, full)?,
                trace: lines(&out.trace),
            })
        }
        AnyInstance::GeneralMcst(_) => Err(Error::Instance(
            "general-bound tree instances have no solver; they are checked by enumeration".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_edge_cover_tight, random_mcst, rng_for};
    use crate::mcst::run;
    use crate::numeric::q;
    use crate::structures::io::to_canonical_json;

    #[test]
    fn num_renders_fraction_and_decimal() {
        let n = Num::from(q(3, 4));
        let s = to_canonical_json(&n);
        assert!(s.contains("\"exact\": \"3/4\""));
        assert!(s.contains("\"decimal\": 0.75"));
    }

    #[test]
    fn mcst_report_recomputes_loads() {
        let inst = random_mcst(&mut rng_for(3, 0)).unwrap();
        let out = run(&inst).unwrap();
        let rep = mcst_report(&inst, &out.tree, &out.initial_objective, Some(&out.trace), true).unwrap();
        assert!(rep.passed(), "{:?}", rep.failed_checks());
        assert_eq!(rep.outcome.cost.exact, inst.graph.cost_of(&out.tree));
        assert_eq!(rep.checks.iter().filter(|c| c.name.starts_with("degree_set_")).count(), inst.sets().len());
    }

    #[test]
    fn bad_solution_fails_checks() {
        let inst = gen_edge_cover_tight(1).unwrap();
        let rep = intersection_report(&inst, 0b0001, &q(2, 1), false);
        assert!(!rep.passed());
        assert_eq!(rep.failed_checks()[0].name, "covers_r1_and_r2");
    }
}
