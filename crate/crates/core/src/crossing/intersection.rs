//! Iterative relaxation for crossing contra-polymatroid intersection.

use serde::{Deserialize, Serialize};

use super::uncross::{uncross_chain, ChainDomain};
use crate::bits::{bit, bits, count, full, is_subset};
use crate::error::{Error, Result};
use crate::lp::{masked_sum_over, solve_to_extreme_point, CoverLp, ExtremePoint, LpStats, RowTag};
use crate::numeric::Rational;
use crate::structures::IntersectionInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum IntersectionEvent {
    SolveLp {
        elements: Vec<usize>,
        x: Vec<Rational>,
        objective: Rational,
        certificate_rank: usize,
    },
    Delete {
        elements: Vec<usize>,
    },
    Fix {
        elements: Vec<usize>,
        /// Residual bounds after the fractional decrement.
        residuals: Vec<(usize, Rational)>,
    },
    Drop {
        index: usize,
        residual: Rational,
        remaining: usize,
        threshold: Rational,
    },
}

/// Outcome of the chain token check on one fractional vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTokenReport {
    pub function: usize,
    pub chain_len: usize,
    pub total: Rational,
    pub top_is_everything: bool,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct IntersectionRun {
    pub solution: u64,
    pub cost: Rational,
    pub initial_objective: Rational,
    pub trace: Vec<IntersectionEvent>,
    pub chain_checks: Vec<ChainTokenReport>,
    pub lp_stats: LpStats,
}

struct CoverChain<'a> {
    inst: &'a IntersectionInstance,
    function: usize,
    undecided: u64,
    fixed: u64,
    x: &'a [Rational],
}

impl ChainDomain for CoverChain<'_> {
    fn leq(&self, a: u64, b: u64) -> bool {
        is_subset(a, b)
    }
    fn meet(&self, a: u64, b: u64) -> u64 {
        a & b
    }
    fn join(&self, a: u64, b: u64) -> u64 {
        a | b
    }
    fn vector(&self, a: u64) -> Vec<Rational> {
        bits(self.undecided)
            .map(|e| if a >> e & 1 == 1 { Rational::one() } else { Rational::zero() })
            .collect()
    }
    fn is_tight(&self, a: u64) -> bool {
        let rhs = self.inst.pair.r(self.function - 1, a) - count(self.fixed & a) as i64;
        masked_sum_over(self.undecided, self.x, a) == Rational::from(rhs)
    }
    fn width(&self) -> usize {
        count(self.undecided)
    }
}

/// Uncrosses the tight rows of function `k` in the certificate of `sol`
/// and checks `|chain| <= x(E')`, with the top equal to `E'` on equality.
/// Requires `x > 0` on every undecided element.
pub fn check_chain_token_bound(
    inst: &IntersectionInstance,
    sol: &ExtremePoint,
    undecided: u64,
    fixed: u64,
    function: usize,
) -> Result<ChainTokenReport> {
    let x = sol.values();
    let tight: Vec<u64> = sol
        .tight_constraints()
        .into_iter()
        .filter_map(|(tag, _)| match tag {
            RowTag::Cover { function: f, set } if *f == function => Some(*set),
            _ => None,
        })
        .collect();
    let dom = CoverChain {
        inst,
        function,
        undecided,
        fixed,
        x,
    };
    let chain = uncross_chain(&dom, &tight)?;
    let total: Rational = x.iter().sum();
    let len = Rational::from(chain.members.len());
    let top_is_everything = chain.members.last().is_some_and(|&t| undecided & !t == 0);
    let ok = len < total || (len == total && top_is_everything);
    Ok(ChainTokenReport {
        function,
        chain_len: chain.members.len(),
        total,
        top_is_everything,
        ok,
    })
}

fn solve(lp: &CoverLp, first: bool) -> Result<ExtremePoint> {
    solve_to_extreme_point(lp).map_err(|e| match e {
        Error::Infeasible(m) if !first => Error::Invariant(format!("LP became infeasible mid-run: {m}")),
        other => other,
    })
}

pub fn run_intersection(inst: &IntersectionInstance) -> Result<IntersectionRun> {
    let n = inst.n();
    let delta = inst.delta() as i64;
    let mut undecided = full(n);
    let mut fixed = 0u64;
    let mut active: Vec<(usize, Rational)> = (0..inst.constraints.len()).map(|i| (i, inst.upper(i).clone())).collect();
    let mut trace = Vec::new();
    let mut chain_checks = Vec::new();
    let mut lp_stats = LpStats::default();
    let mut initial_objective = None;

    while undecided != 0 {
        let lp = CoverLp {
            inst,
            undecided,
            fixed,
            active: active.clone(),
        };
        let sol = solve(&lp, initial_objective.is_none())?;
        lp_stats.record(&sol);
        if !sol.certified {
            return Err(Error::Invariant("intersection LP vertex failed its certificate".into()));
        }
        let x = sol.values().to_vec();
        let vars: Vec<usize> = bits(undecided).collect();
        initial_objective.get_or_insert_with(|| sol.objective().clone());
        trace.push(IntersectionEvent::SolveLp {
            elements: vars.clone(),
            x: x.clone(),
            objective: sol.objective().clone(),
            certificate_rank: sol.certificate_rank(),
        });
        if x.iter().all(Rational::is_positive) {
            for k in 1..=2 {
                let rep = check_chain_token_bound(inst, &sol, undecided, fixed, k)?;
                if !rep.ok {
                    return Err(Error::Invariant(format!("chain token bound fails: {rep:?}")));
                }
                chain_checks.push(rep);
            }
        }

        let mut progress = false;
        let zeros: Vec<usize> = vars.iter().zip(&x).filter(|(_, v)| v.is_zero()).map(|(&e, _)| e).collect();
        if !zeros.is_empty() {
            for &e in &zeros {
                undecided &= !bit(e);
            }
            trace.push(IntersectionEvent::Delete { elements: zeros });
            progress = true;
        }
        let half = Rational::new(1, 2);
        let halves: Vec<(usize, Rational)> =
            vars.iter().zip(&x).filter(|(_, v)| **v >= half).map(|(&e, v)| (e, v.clone())).collect();
        if !halves.is_empty() {
            for (e, v) in &halves {
                undecided &= !bit(*e);
                fixed |= bit(*e);
                for (i, b) in active.iter_mut() {
                    if inst.constraints[*i].elements >> e & 1 == 1 {
                        *b -= v;
                    }
                }
            }
            trace.push(IntersectionEvent::Fix {
                elements: halves.iter().map(|(e, _)| *e).collect(),
                residuals: active.clone(),
            });
            progress = true;
        }
        let mut kept = Vec::new();
        for (i, b) in active {
            let elems = inst.constraints[i].elements;
            let remaining = count(elems & undecided);
            let threshold = Rational::from((b.clone() * Rational::from(2)).ceil()) + Rational::from(delta - 1);
            if Rational::from(remaining) <= threshold {
                let total = Rational::from(count(elems & fixed) + remaining);
                let limit = Rational::from(2) * inst.upper(i) + Rational::from(delta - 1);
                if total > limit {
                    return Err(Error::Invariant(format!("constraint {i} dropped with {total} > 2b+Δ-1 = {limit}")));
                }
                trace.push(IntersectionEvent::Drop {
                    index: i,
                    residual: b,
                    remaining,
                    threshold,
                });
                progress = true;
            } else {
                kept.push((i, b));
            }
        }
        active = kept;
        if !progress {
            return Err(Error::Invariant(format!(
                "no element rounded and no bound dropped; x={:?}",
                x.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            )));
        }
    }

    let initial_objective = initial_objective.unwrap_or_default();
    let cost = inst.cost_of(fixed);
    if cost > Rational::from(2) * &initial_objective {
        return Err(Error::Invariant(format!("cost {cost} exceeds twice the LP optimum {initial_objective}")));
    }
    Ok(IntersectionRun {
        solution: fixed,
        cost,
        initial_objective,
        trace,
        chain_checks,
        lp_stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub covers: bool,
    /// `(index, load, limit)` for each constraint.
    pub loads: Vec<(usize, usize, Rational)>,
    pub cost: Rational,
    pub lp_optimum: Rational,
    pub failures: Vec<String>,
}

impl IntersectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks coverage of both functions on every subset, `|sol ∩ E_i| <=
/// 2 b_i + Δ - 1`, and `cost <= 2 * lp_opt`.
pub fn verify_intersection(inst: &IntersectionInstance, solution: u64, lp_opt: &Rational) -> IntersectionReport {
    let mut failures = Vec::new();
    let covers = inst.pair.covers(solution);
    if !covers {
        failures.push("solution misses a rank requirement".into());
    }
    let delta = inst.delta() as i64;
    let loads: Vec<(usize, usize, Rational)> = (0..inst.constraints.len())
        .map(|i| {
            let load = count(solution & inst.constraints[i].elements);
            let limit = Rational::from(2) * inst.upper(i) + Rational::from(delta - 1);
            (i, load, limit)
        })
        .collect();
    for (i, load, limit) in &loads {
        if Rational::from(*load) > *limit {
            failures.push(format!("constraint {i}: load {load} exceeds {limit}"));
        }
    }
    let cost = inst.cost_of(solution);
    if cost > Rational::from(2) * lp_opt {
        failures.push(format!("cost {cost} exceeds twice {lp_opt}"));
    }
    IntersectionReport {
        covers,
        loads,
        cost,
        lp_optimum: lp_opt.clone(),
        failures,
    }
}

/// Optimum of the initial relaxation.
pub fn intersection_lp_optimum(inst: &IntersectionInstance) -> Result<ExtremePoint> {
    let lp = CoverLp {
        inst,
        undecided: full(inst.n()),
        fixed: 0,
        active: (0..inst.constraints.len()).map(|i| (i, inst.upper(i).clone())).collect(),
    };
    solve_to_extreme_point(&lp)
}
