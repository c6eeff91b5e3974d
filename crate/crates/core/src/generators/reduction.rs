//! Crossing uniform matroid to general MCST: the hardness gadget.

use serde::{Deserialize, Serialize};

use super::gap::{gadget_graph, subset_tree, tree_subset, u_star, w_star};
use crate::bits::{bit, count, full, to_indices};
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::oracles::{for_each_spanning_tree, EdgeOrder};
use crate::structures::{EdgeBound, GeneralMcstInstance};

/// Uniform matroid of rank `t` on `[e]` with bounds `|B ∩ C| <= b(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformCrossing {
    pub e: usize,
    pub t: usize,
    pub bounds: Vec<(u64, i64)>,
}

impl UniformCrossing {
    pub fn new(e: usize, t: usize, bounds: Vec<(u64, i64)>) -> Result<Self> {
        if t > e {
            return Err(Error::Instance(format!("rank {t} exceeds ground size {e}")));
        }
        if e > 16 {
            return Err(Error::Guard(format!("uniform matroid on {e} elements exceeds 16")));
        }
        if let Some((c, _)) = bounds.iter().find(|(c, b)| *c & !full(e) != 0 || *b < 0) {
            return Err(Error::Instance(format!("bound on {c:#b} is malformed")));
        }
        Ok(UniformCrossing { e, t, bounds })
    }

    /// First `t`-subset, in increasing mask order, meeting every bound.
    pub fn feasible_basis(&self) -> Option<u64> {
        (0..=full(self.e))
            .filter(|&b| count(b) == self.t)
            .find(|&b| self.bounds.iter().all(|&(c, bc)| count(b & c) as i64 <= bc))
    }
}

/// Gadget graph; bound `|C| + b(C)` on `δ({u_i : i ∈ C})` per input bound
/// and the special bound `2e - t` on `∪ δ(w_i)`, which is the last bound.
pub fn reduce_uniform_crossing_to_mcst(src: &UniformCrossing) -> Result<GeneralMcstInstance> {
    let e = src.e;
    let mut bounds: Vec<EdgeBound> = src
        .bounds
        .iter()
        .enumerate()
        .map(|(i, &(c, b))| EdgeBound {
            label: format!("C{i}"),
            edges: u_star(c),
            bound: Rational::from(count(c) as i64 + b),
        })
        .collect();
    bounds.push(EdgeBound {
        label: "special".into(),
        edges: w_star(full(e)),
        bound: Rational::from(2 * e as i64 - src.t as i64),
    });
    GeneralMcstInstance::new(gadget_graph(e)?, bounds)
}

/// The yes-case tree for basis `b`: `(r,u_i), (u_i,v_i), (r,w_i)` for
/// `i ∈ b`, and `(r,w_i), (w_i,v_i), (r,u_i)` otherwise.
pub fn yes_tree(e: usize, basis: u64) -> Vec<usize> {
    subset_tree(e, basis)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub e: usize,
    pub t: usize,
    pub tree_count: u64,
    /// Every tree uses exactly three edges of every gadget.
    pub three_per_gadget: bool,
    /// Every subset `X` is realised by exactly `2^e` trees.
    pub fibres_uniform: bool,
    /// Loads agree with `|C| + |X ∩ C|` and `2e - |X|` on every tree.
    pub loads_match: bool,
    pub feasible_basis: Option<Vec<usize>>,
    pub feasible_trees: u64,
    pub yes_tree: Option<Vec<usize>>,
    pub yes_tree_special_load: Option<usize>,
    pub yes_tree_feasible: bool,
    pub min_tree_violation: Rational,
    pub failures: Vec<String>,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Enumerates every spanning tree of the gadget and checks the
/// correspondence with subsets of `[e]` and the yes/no dichotomy.
pub fn check_reduction(src: &UniformCrossing) -> Result<ReductionReport> {
    let e = src.e;
    let inst = reduce_uniform_crossing_to_mcst(src)?;
    let special = inst.bounds.len() - 1;
    let mut three = true;
    let mut loads_match = true;
    let mut fibres = vec![0u64; 1 << e];
    let mut feasible_trees = 0u64;
    let mut min_violation: Option<Rational> = None;
    let tree_count = for_each_spanning_tree(&inst.graph, EdgeOrder::Forward, |t| {
        let load = |edges: &[usize]| edges.iter().filter(|x| t.contains(x)).count();
        let Some(x) = tree_subset(e, t) else {
            three = false;
            return;
        };
        fibres[x as usize] += 1;
        for (b, &(c, _)) in inst.bounds.iter().zip(&src.bounds) {
            if load(&b.edges) != count(c) + count(c & x) {
                loads_match = false;
            }
        }
        if load(&inst.bounds[special].edges) != 2 * e - count(x) {
            loads_match = false;
        }
        let v = inst.max_violation(t);
        if v.is_zero() {
            feasible_trees += 1;
        }
        if min_violation.as_ref().is_none_or(|m| v < *m) {
            min_violation = Some(v);
        }
    })?;

    let mut failures = Vec::new();
    let expected = 4u64.pow(e as u32);
    if tree_count != expected {
        failures.push(format!("{tree_count} trees, expected 4^{e} = {expected}"));
    }
    let fibres_uniform = fibres.iter().all(|&f| f == 1 << e);
    if !three {
        failures.push("a tree uses other than three edges of some gadget".into());
    }
    if !fibres_uniform {
        failures.push("subset fibres are not all of size 2^e".into());
    }
    if !loads_match {
        failures.push("a tree load disagrees with its subset".into());
    }
    let basis = src.feasible_basis();
    if basis.is_some() != (feasible_trees > 0) {
        failures.push(format!(
            "feasible basis {} but {feasible_trees} feasible trees",
            if basis.is_some() { "exists" } else { "missing" }
        ));
    }
    let (yes, special_load, yes_ok) = match basis {
        Some(b) => {
            let t = yes_tree(e, b);
            let sl = inst.bounds[special].edges.iter().filter(|x| t.contains(x)).count();
            let ok = inst.graph.is_spanning_tree(&t) && inst.max_violation(&t).is_zero();
            if !ok {
                failures.push("yes-case tree violates a bound".into());
            }
            if sl != 2 * e - src.t {
                failures.push(format!("yes-case tree has special load {sl}, expected {}", 2 * e - src.t));
            }
            (Some(t), Some(sl), ok)
        }
        None => (None, None, false),
    };
    Ok(ReductionReport {
        e,
        t: src.t,
        tree_count,
        three_per_gadget: three,
        fibres_uniform,
        loads_match,
        feasible_basis: basis.map(to_indices),
        feasible_trees,
        yes_tree: yes,
        yes_tree_special_load: special_load,
        yes_tree_feasible: yes_ok,
        min_tree_violation: min_violation.unwrap_or_default(),
        failures,
    })
}

/// Bound families on `e = 3, t = 2` used by the acceptance suite: both yes
/// and no instances.
pub fn sample_families() -> Vec<Vec<(u64, i64)>> {
    vec![
        vec![(bit(0) | bit(1), 1)],
        vec![(bit(0) | bit(1), 0)],
        vec![(bit(0) | bit(1), 1), (bit(1) | bit(2), 1), (bit(0) | bit(2), 1)],
        vec![(bit(0) | bit(1), 1), (bit(2), 0)],
        vec![(full(3), 1)],
        vec![],
    ]
}
