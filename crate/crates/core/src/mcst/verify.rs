use serde::{Deserialize, Serialize};

use super::trace::{replay, TraceEvent};
use super::ALPHA;
use crate::error::{Error, Result};
use crate::lp::{solve_to_extreme_point, LpStats, McstLp};
use crate::numeric::Rational;
use crate::structures::McstInstance;

/// `ceil(log_{8/7}(size))`: the least `k` with `8^k >= size * 7^k`.
pub fn drop_round_limit(size: usize) -> usize {
    let mut k = 0u32;
    let (mut a, mut b) = (1u128, size as u128);
    while a < b {
        a *= 8;
        b *= 7;
        k += 1;
    }
    k as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub drop_rounds: usize,
    pub round_limit: usize,
    pub family_sizes: Vec<usize>,
    /// Largest `|tree ∩ δ(S)| - b(S)` over original nodes.
    pub max_violation: Rational,
    pub additive_bound: Rational,
    pub blocks_checked: usize,
    pub cost: Rational,
    pub lp_optimum: Rational,
    /// Cost at most the LP optimum.
    pub cost_ok: bool,
    /// Every original set within `b(S) + 96T`.
    pub loads_ok: bool,
    /// Every snapshot block inequality holds.
    pub blocks_ok: bool,
    /// Each drop round removed at least an eighth of the family.
    pub shrink_ok: bool,
    /// `T` within the round limit.
    pub rounds_ok: bool,
    /// Replay, tree shape and LP re-solve agree with the run.
    pub consistent: bool,
    /// Certification tally of the re-solved initial LP.
    pub lp_stats: LpStats,
    pub failures: Vec<String>,
}

impl GuaranteeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the drop-round count, the additive violation bound on every
/// original set, the block inequality on every snapshot, and the cost.
pub fn verify_guarantee(instance: &McstInstance, tree: &[usize], trace: &[TraceEvent]) -> Result<GuaranteeReport> {
    let graph = &instance.graph;
    let rep = replay(instance, trace)?;
    let mut failures = Vec::new();
    let mut consistent = true;
    if rep.tree != tree {
        consistent = false;
        failures.push("replayed tree differs from the reported tree".into());
    }
    if !graph.is_spanning_tree(tree) {
        consistent = false;
        failures.push("output is not a spanning tree".into());
    }

    let t_total = rep.snapshots.len() - 1;
    let sizes: Vec<usize> = rep.snapshots.iter().map(|s| s.size()).collect();
    let limit = drop_round_limit(2 * graph.n() - 1);
    let mut shrink_ok = true;
    for t in 1..sizes.len() {
        let (before, after) = (sizes[t - 1], sizes[t]);
        if after > before || 8 * (before - after) < before {
            shrink_ok = false;
            failures.push(format!("round {t}: family shrank from {before} to {after}, less than an eighth"));
        }
    }
    let rounds_ok = t_total <= limit;
    if !rounds_ok {
        failures.push(format!("{t_total} drop rounds exceed the limit {limit}"));
    }

    let four_alpha = Rational::from((4 * ALPHA) as i64);
    let additive = &four_alpha * &Rational::from(t_total as i64);
    let mut max_violation: Option<Rational> = None;
    let mut loads_ok = true;
    for id in 0..instance.family.capacity() {
        let set = instance.family.vertices(id);
        let load = Rational::from(graph.cut_load(tree, set));
        let viol = &load - instance.family.bound(id);
        if viol > additive {
            loads_ok = false;
            failures.push(format!("node {id}: load {load} exceeds bound {} + {additive}", instance.family.bound(id)));
        }
        max_violation = Some(max_violation.map_or(viol.clone(), |m| m.max(viol)));
    }

    let mut blocks_checked = 0;
    let mut blocks_ok = true;
    for (t, snap) in rep.snapshots.iter().enumerate() {
        let slack = &four_alpha * &Rational::from((t_total - t) as i64);
        for block in snap.forest.all_consecutive_blocks() {
            blocks_checked += 1;
            let union = block.iter().fold(0u64, |m, &id| m | snap.forest.vertices(id));
            let inc = tree
                .iter()
                .filter(|&&e| snap.undecided.binary_search(&e).is_ok() && graph.edge(e).crosses(union))
                .count();
            let bnd: Rational = block.iter().map(|&id| snap.forest.bound(id)).sum();
            if Rational::from(inc) > &bnd + &slack {
                blocks_ok = false;
                failures.push(format!("t={t} block {block:?}: Inc {inc} > Bnd {bnd} + {slack}"));
            }
        }
    }

    let lp = McstLp::new(graph, (0..graph.m()).collect(), vec![], &instance.family);
    let sol = solve_to_extreme_point(&lp)?;
    let mut lp_stats = LpStats::default();
    lp_stats.record(&sol);
    if !(sol.certified && sol.separation_clean) {
        consistent = false;
        failures.push("re-solved initial LP vertex is not certified".into());
    }
    let lp_optimum = sol.objective().clone();
    let cost = graph.cost_of(tree);
    let cost_ok = cost <= lp_optimum;
    if !cost_ok {
        failures.push(format!("cost {cost} exceeds LP optimum {lp_optimum}"));
    }
    if let Some(TraceEvent::SolveLp { objective, .. }) = trace.first() {
        if *objective != lp_optimum {
            consistent = false;
            failures.push(format!("trace LP value {objective} differs from re-solved {lp_optimum}"));
        }
    } else if graph.m() > 0 {
        return Err(Error::Invariant("trace does not start with an LP solve".into()));
    }

    Ok(GuaranteeReport {
        drop_rounds: t_total,
        round_limit: limit,
        family_sizes: sizes,
        max_violation: max_violation.unwrap_or_default(),
        additive_bound: additive,
        blocks_checked,
        cost,
        lp_optimum,
        cost_ok,
        loads_ok,
        blocks_ok,
        shrink_ok,
        rounds_ok,
        consistent,
        lp_stats,
        failures,
    })
}
