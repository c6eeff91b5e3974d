//! Iterative relaxation for crossing lattice polyhedra.

use serde::{Deserialize, Serialize};

use super::uncross::{uncross_chain, ChainDomain};
use crate::bits::{bit, bits, count, full};
use crate::error::{Error, Result};
use crate::lp::{masked_sum_over, solve_to_extreme_point, ExtremePoint, LatticeLp, LpStats, RowTag};
use crate::numeric::Rational;
use crate::oracles::brute_subset_opt;
use crate::structures::{LatticeInstance, LatticeOracle, LatticeVariant};

/// Largest lattice for the per-fix residual supermodularity check.
pub const RESIDUAL_CHECK_MEMBERS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LatticeEvent {
    SolveLp {
        elements: Vec<usize>,
        x: Vec<Rational>,
        objective: Rational,
        certificate_rank: usize,
    },
    Delete {
        element: usize,
    },
    Fix {
        element: usize,
    },
    Drop {
        index: usize,
        remaining: usize,
        used: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainGrowthReport {
    pub chain: Vec<u64>,
    /// New undecided elements contributed by each chain member.
    pub growth: Vec<usize>,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct LatticeRun {
    pub solution: u64,
    pub cost: Rational,
    pub initial_objective: Rational,
    pub trace: Vec<LatticeEvent>,
    pub chain_checks: Vec<ChainGrowthReport>,
    pub lp_stats: LpStats,
}

/// Property (*): `S < T` implies `|rho(S)| < |rho(T)|`.
pub fn check_monotonicity_star(lat: &LatticeOracle) -> Option<(usize, usize)> {
    lat.monotonicity_witness()
}

struct RankChain<'a> {
    lat: &'a LatticeOracle,
    undecided: u64,
    fixed: u64,
    x: &'a [Rational],
}

impl ChainDomain for RankChain<'_> {
    fn leq(&self, a: u64, b: u64) -> bool {
        self.lat.leq(a as usize, b as usize)
    }
    fn meet(&self, a: u64, b: u64) -> u64 {
        self.lat.meet(a as usize, b as usize) as u64
    }
    fn join(&self, a: u64, b: u64) -> u64 {
        self.lat.join(a as usize, b as usize) as u64
    }
    fn vector(&self, a: u64) -> Vec<Rational> {
        let rho = self.lat.rho(a as usize);
        bits(self.undecided)
            .map(|e| if rho >> e & 1 == 1 { Rational::one() } else { Rational::zero() })
            .collect()
    }
    fn is_tight(&self, a: u64) -> bool {
        let rho = self.lat.rho(a as usize);
        let rhs = self.lat.rank(a as usize) - count(self.fixed & rho) as i64;
        masked_sum_over(self.undecided, self.x, rho) == Rational::from(rhs)
    }
    fn width(&self) -> usize {
        count(self.undecided)
    }
}

fn tight_members(sol: &ExtremePoint) -> Vec<u64> {
    sol.tight_constraints()
        .into_iter()
        .filter_map(|(tag, _)| match tag {
            RowTag::Rank { member } => Some(*member as u64),
            _ => None,
        })
        .collect()
}

/// Uncrosses the tight rank rows of a vertex with `0 < x < 1` on `E'` and
/// checks that each chain member adds at least two new undecided elements.
pub fn check_chain_growth(lat: &LatticeOracle, sol: &ExtremePoint, undecided: u64, fixed: u64) -> Result<ChainGrowthReport> {
    let dom = RankChain {
        lat,
        undecided,
        fixed,
        x: sol.values(),
    };
    let chain = uncross_chain(&dom, &tight_members(sol))?;
    let mut seen = 0u64;
    let mut growth = Vec::new();
    for &m in &chain.members {
        let rho = lat.rho(m as usize) & undecided;
        growth.push(count(rho & !seen));
        seen |= rho;
    }
    let ok = growth.iter().all(|&g| g >= 2);
    Ok(ChainGrowthReport {
        chain: chain.members,
        growth,
        ok,
    })
}

fn solve(lp: &LatticeLp, first: bool) -> Result<ExtremePoint> {
    solve_to_extreme_point(lp).map_err(|e| match e {
        Error::Infeasible(m) if !first => Error::Invariant(format!("LP became infeasible mid-run: {m}")),
        other => other,
    })
}

pub fn run_lattice(inst: &LatticeInstance) -> Result<LatticeRun> {
    inst.check_variant()?;
    if let Some((a, b)) = check_monotonicity_star(&inst.lattice) {
        return Err(Error::Instance(format!("lattice violates monotonicity: member {a} < {b} with equal |rho|")));
    }
    let n = inst.n();
    let delta = inst.delta();
    let mut undecided = full(n);
    let mut fixed = 0u64;
    let mut active: Vec<usize> = (0..inst.constraints.len()).collect();
    let mut trace = Vec::new();
    let mut chain_checks = Vec::new();
    let mut lp_stats = LpStats::default();
    let mut initial_objective: Option<Rational> = None;
    let mut potential = count(undecided) + active.len() + 1;

    while undecided != 0 || !active.is_empty() {
        let size = count(undecided) + active.len();
        if size >= potential {
            return Err(Error::Invariant("|E'| + |W| failed to decrease".into()));
        }
        potential = size;

        let mut x = Vec::new();
        let mut sol = None;
        if undecided != 0 {
            let lp = LatticeLp {
                inst,
                undecided,
                fixed,
                active: active.clone(),
            };
            let s = solve(&lp, initial_objective.is_none())?;
            lp_stats.record(&s);
            if !s.certified {
                return Err(Error::Invariant("lattice LP vertex failed its certificate".into()));
            }
            let total = inst.cost_of(fixed) + s.objective();
            if let Some(z0) = &initial_objective {
                if total > *z0 {
                    return Err(Error::Invariant(format!("c(F) + LP rose to {total} above {z0}")));
                }
            }
            initial_objective.get_or_insert_with(|| s.objective().clone());
            x = s.values().to_vec();
            trace.push(LatticeEvent::SolveLp {
                elements: bits(undecided).collect(),
                x: x.clone(),
                objective: s.objective().clone(),
                certificate_rank: s.certificate_rank(),
            });
            sol = Some(s);
        }
        let vars: Vec<usize> = bits(undecided).collect();

        if let Some(i) = x.iter().position(Rational::is_zero) {
            undecided &= !bit(vars[i]);
            trace.push(LatticeEvent::Delete { element: vars[i] });
            continue;
        }
        if let Some(i) = x.iter().position(Rational::is_one) {
            undecided &= !bit(vars[i]);
            fixed |= bit(vars[i]);
            trace.push(LatticeEvent::Fix { element: vars[i] });
            if inst.lattice.len() <= RESIDUAL_CHECK_MEMBERS {
                if let Some(w) = inst.lattice.residual_supermodular_witness(fixed) {
                    return Err(Error::Invariant(format!("residual rank not supermodular at {w:?}")));
                }
            }
            continue;
        }

        if let Some(s) = &sol {
            let rep = check_chain_growth(&inst.lattice, s, undecided, fixed)?;
            if inst.variant == LatticeVariant::General && !rep.ok {
                return Err(Error::Invariant(format!("chain growth below two: {rep:?}")));
            }
            chain_checks.push(rep);
        }

        let droppable = active.iter().position(|&i| {
            let c = &inst.constraints[i];
            let remaining = count(c.elements & undecided);
            match inst.variant {
                LatticeVariant::General => remaining <= 2 * delta,
                LatticeVariant::Inclusion => {
                    let b = c.upper.as_ref().expect("inclusion variant has upper bounds");
                    let residual = b - &Rational::from(count(c.elements & fixed));
                    Rational::from(remaining) <= residual + Rational::from(delta as i64 - 1)
                }
            }
        });
        let Some(pos) = droppable else {
            return Err(Error::Invariant(format!(
                "no step applies: W={active:?}, x={:?}",
                x.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            )));
        };
        let i = active.remove(pos);
        let c = &inst.constraints[i];
        let used = count(c.elements & fixed);
        let remaining = count(c.elements & undecided);
        let slack = match inst.variant {
            LatticeVariant::General => 2 * delta as i64 - 1,
            LatticeVariant::Inclusion => delta as i64 - 1,
        };
        if let Some(a) = &c.lower {
            if *a > Rational::from(used as i64 + slack) {
                return Err(Error::Invariant(format!("constraint {i}: lower bound clause fails at drop")));
            }
        }
        if let Some(b) = &c.upper {
            if Rational::from(used + remaining) > b + &Rational::from(slack) {
                return Err(Error::Invariant(format!("constraint {i}: upper bound clause fails at drop")));
            }
        }
        trace.push(LatticeEvent::Drop { index: i, remaining, used });
    }

    let initial_objective = initial_objective.unwrap_or_default();
    let cost = inst.cost_of(fixed);
    if cost > initial_objective {
        return Err(Error::Invariant(format!("cost {cost} exceeds LP optimum {initial_objective}")));
    }
    Ok(LatticeRun {
        solution: fixed,
        cost,
        initial_objective,
        trace,
        chain_checks,
        lp_stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub covers: bool,
    /// Largest additive violation over all bounds.
    pub max_violation: Rational,
    pub allowed_violation: Rational,
    pub cost: Rational,
    /// Cheapest bound-feasible covering set, if the ground set is small enough
    /// and one exists.
    pub brute_optimum: Option<Rational>,
    pub failures: Vec<String>,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_lattice(inst: &LatticeInstance, solution: u64) -> Result<LatticeReport> {
    let mut failures = Vec::new();
    let covers = inst.covers(solution);
    if !covers {
        failures.push("a rank constraint is violated".into());
    }
    let delta = inst.delta() as i64;
    let allowed = Rational::from(match inst.variant {
        LatticeVariant::General => 2 * delta - 1,
        LatticeVariant::Inclusion => delta - 1,
    });
    let mut max_violation = Rational::zero();
    for (i, c) in inst.constraints.iter().enumerate() {
        let load = Rational::from(count(solution & c.elements));
        let mut v = Rational::zero();
        if let Some(a) = &c.lower {
            v = v.max(a - &load);
        }
        if let Some(b) = &c.upper {
            v = v.max(&load - b);
        }
        if v > allowed {
            failures.push(format!("constraint {i} violated by {v}, allowed {allowed}"));
        }
        max_violation = max_violation.max(v);
    }
    let cost = inst.cost_of(solution);
    let brute = if inst.n() <= crate::oracles::MAX_BRUTE_GROUND {
        brute_subset_opt(inst.n(), |s| inst.covers(s) && inst.meets_bounds(s), |s| inst.cost_of(s))?.map(|(c, _)| c)
    } else {
        None
    };
    if let Some(opt) = &brute {
        if cost > *opt {
            failures.push(format!("cost {cost} exceeds the feasible optimum {opt}"));
        }
    }
    Ok(LatticeReport {
        covers,
        max_violation,
        allowed_violation: allowed,
        cost,
        brute_optimum: brute,
        failures,
    })
}

/// Optimum of the initial relaxation.
pub fn lattice_lp_optimum(inst: &LatticeInstance) -> Result<ExtremePoint> {
    let lp = LatticeLp {
        inst,
        undecided: full(inst.n()),
        fixed: 0,
        active: (0..inst.constraints.len()).collect(),
    };
    solve_to_extreme_point(&lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;
    use crate::structures::{matroid_to_lattice, CrossingConstraint, MatroidOracle};

    #[test]
    fn free_matroid_takes_everything() {
        let lat = matroid_to_lattice(&MatroidOracle::free(3).unwrap()).unwrap();
        let inst = LatticeInstance::new(lat, vec![q(1, 1); 3], vec![], LatticeVariant::General).unwrap();
        let run = run_lattice(&inst).unwrap();
        assert_eq!(run.solution, 0b111);
        assert!(verify_lattice(&inst, run.solution).unwrap().passed());
    }

    #[test]
    fn triangle_graphic_with_bound() {
        let m = MatroidOracle::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let lat = matroid_to_lattice(&m).unwrap();
        let inst = LatticeInstance::new(
            lat,
            vec![q(1, 1), q(1, 1), q(3, 1)],
            vec![CrossingConstraint::upper(0b011, q(1, 1))],
            LatticeVariant::General,
        )
        .unwrap();
        let run = run_lattice(&inst).unwrap();
        assert!(m.is_basis(run.solution));
        assert!(count(run.solution & 0b011) <= 2);
        assert!(verify_lattice(&inst, run.solution).unwrap().passed());
    }

    #[test]
    fn uniform_with_lower_bound() {
        let lat = matroid_to_lattice(&MatroidOracle::uniform(2, 4).unwrap()).unwrap();
        let cons = vec![CrossingConstraint {
            elements: 0b0011,
            lower: Some(q(2, 1)),
            upper: None,
        }];
        let inst = LatticeInstance::new(lat, vec![q(5, 1), q(5, 1), q(1, 1), q(1, 1)], cons, LatticeVariant::General).unwrap();
        let run = run_lattice(&inst).unwrap();
        assert!(inst.covers(run.solution));
        assert!(count(run.solution & 0b0011) >= 1);
        assert!(verify_lattice(&inst, run.solution).unwrap().passed());
    }

    #[test]
    fn k4_degree_bounds_give_fractional_vertex() {
        // Edges 0:(0,1) 1:(0,2) 2:(0,3) 3:(1,2) 4:(1,3) 5:(2,3); one star per node.
        let m = MatroidOracle::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let lat = matroid_to_lattice(&m).unwrap();
        let bound = |elements, lower: Option<i64>, upper| CrossingConstraint {
            elements,
            lower: lower.map(Rational::from),
            upper: Some(Rational::from(upper)),
        };
        let cons = vec![
            bound(0b000111, Some(2), 3),
            bound(0b011001, None, 2),
            bound(0b101010, None, 3),
            bound(0b110100, Some(2), 2),
        ];
        let costs = [5, 1, 8, 9, 9, 4].map(Rational::from).to_vec();
        let inst = LatticeInstance::new(lat, costs, cons, LatticeVariant::General).unwrap();
        let lp = LatticeLp {
            inst: &inst,
            undecided: 0b111111,
            fixed: 0,
            active: (0..4).collect(),
        };
        let sol = solve_to_extreme_point(&lp).unwrap();
        assert!(sol.certified);
        assert_eq!(sol.values(), &[q(1, 2), q(1, 1), q(1, 2), q(0, 1), q(1, 2), q(1, 1)]);

        let run = run_lattice(&inst).unwrap();
        assert!(!run.chain_checks.is_empty());
        assert!(run.chain_checks.iter().all(|c| c.ok && c.growth.iter().all(|&g| g >= 2)));
        let rep = verify_lattice(&inst, run.solution).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn star_violation_is_rejected() {
        // Two-member chains 0 < 1; the second has equal rho sizes.
        let meet = vec![vec![0, 0], vec![0, 1]];
        let join = vec![vec![0, 1], vec![1, 1]];
        let lat = LatticeOracle::explicit(2, vec![0b01, 0b11], vec![0, 1], meet, join).unwrap();
        assert_eq!(check_monotonicity_star(&lat), None);
        let meet = vec![vec![0, 0], vec![0, 1]];
        let join = vec![vec![0, 1], vec![1, 1]];
        let lat = LatticeOracle::explicit(2, vec![0b01, 0b10], vec![0, 0], meet, join).unwrap();
        assert_eq!(check_monotonicity_star(&lat), Some((0, 1)));
        let inst = LatticeInstance::new(lat, vec![q(1, 1); 2], vec![], LatticeVariant::General).unwrap();
        assert!(matches!(run_lattice(&inst), Err(Error::Instance(_))));
    }
}
