use std::cmp::Ordering;

use super::trees::{for_each_spanning_tree, EdgeOrder};
use crate::bits::{full, set_order};
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::structures::{GeneralMcstInstance, Graph, McstInstance, UnionFind};

/// Largest ground set for subset enumeration.
pub const MAX_BRUTE_GROUND: usize = 16;

/// A bound `|T ∩ edges| <= bound` on a set of edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeBoundSet {
    pub edges: Vec<usize>,
    pub bound: Rational,
}

impl EdgeBoundSet {
    pub fn from_laminar(instance: &McstInstance) -> Vec<EdgeBoundSet> {
        let g = &instance.graph;
        instance
            .sets()
            .into_iter()
            .map(|(set, bound)| EdgeBoundSet {
                edges: g.edges().iter().filter(|e| e.crosses(set)).map(|e| e.id).collect(),
                bound,
            })
            .collect()
    }

    pub fn from_general(instance: &GeneralMcstInstance) -> Vec<EdgeBoundSet> {
        instance
            .bounds
            .iter()
            .map(|b| EdgeBoundSet {
                edges: b.edges.clone(),
                bound: b.bound.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteMcst {
    pub tree_count: u64,
    /// Cheapest tree meeting every bound, if any.
    pub optimum: Option<(Rational, Vec<usize>)>,
    /// Smallest achievable maximum violation `max(0, |T ∩ E_i| - b_i)`.
    pub min_max_violation: Rational,
    pub min_violation_tree: Vec<usize>,
    /// `profile[v]`: cheapest tree with every violation at most `v`.
    pub profile: Vec<Option<Rational>>,
}

/// Exhaustive search over all spanning trees.
pub fn brute_mcst(graph: &Graph, bounds: &[EdgeBoundSet], order: EdgeOrder) -> Result<BruteMcst> {
    let member: Vec<Vec<bool>> = bounds
        .iter()
        .map(|b| {
            let mut m = vec![false; graph.m()];
            for &e in &b.edges {
                m[e] = true;
            }
            m
        })
        .collect();
    let mut trees: Vec<(Rational, Rational, Vec<usize>)> = Vec::new();
    let count = for_each_spanning_tree(graph, order, |t| {
        let mut worst = Rational::zero();
        for (b, m) in bounds.iter().zip(&member) {
            let load = Rational::from(t.iter().filter(|&&e| m[e]).count());
            let v = &load - &b.bound;
            if v > worst {
                worst = v;
            }
        }
        trees.push((worst, graph.cost_of(t), t.to_vec()));
    })?;
    let better = |a: &(Rational, Vec<usize>), b: &(Rational, Vec<usize>)| match a.0.cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Equal => a.1 < b.1,
        Ordering::Greater => false,
    };
    let mut optimum: Option<(Rational, Vec<usize>)> = None;
    let mut min_viol: Option<(Rational, Vec<usize>)> = None;
    for (viol, cost, t) in &trees {
        if viol.is_zero() {
            let cand = (cost.clone(), t.clone());
            if optimum.as_ref().is_none_or(|o| better(&cand, o)) {
                optimum = Some(cand);
            }
        }
        let cand = (viol.clone(), t.clone());
        if min_viol.as_ref().is_none_or(|o| better(&cand, o)) {
            min_viol = Some(cand);
        }
    }
    let (min_max_violation, min_violation_tree) = min_viol.unwrap_or_default();
    let top = trees.iter().map(|t| t.0.ceil()).max().and_then(|b| usize::try_from(b).ok()).unwrap_or(0);
    let profile = (0..=top)
        .map(|v| {
            let cap = Rational::from(v);
            trees.iter().filter(|t| t.0 <= cap).map(|t| t.1.clone()).min()
        })
        .collect();
    Ok(BruteMcst {
        tree_count: count,
        optimum,
        min_max_violation,
        min_violation_tree,
        profile,
    })
}

/// Kruskal with ties broken by edge id.
pub fn greedy_mst(graph: &Graph) -> Option<(Rational, Vec<usize>)> {
    let mut ids: Vec<usize> = (0..graph.m()).collect();
    ids.sort_by(|&a, &b| graph.edge(a).cost.cmp(&graph.edge(b).cost).then(a.cmp(&b)));
    let mut uf = UnionFind::new(graph.n());
    let mut tree = Vec::new();
    for e in ids {
        let ed = graph.edge(e);
        if uf.union(ed.u, ed.v) {
            tree.push(e);
        }
    }
    tree.sort_unstable();
    graph.is_spanning_tree(&tree).then(|| (graph.cost_of(&tree), tree))
}

/// Cheapest subset of `0..n` satisfying `feasible`; ties go to the smaller
/// set under [`set_order`].
pub fn brute_subset_opt(
    n: usize,
    feasible: impl Fn(u64) -> bool,
    cost: impl Fn(u64) -> Rational,
) -> Result<Option<(Rational, u64)>> {
    if n > MAX_BRUTE_GROUND {
        return Err(Error::Guard(format!("subset enumeration supports at most {MAX_BRUTE_GROUND} elements, got {n}")));
    }
    let mut best: Option<(Rational, u64)> = None;
    for s in 0..=full(n) {
        if !feasible(s) {
            continue;
        }
        let c = cost(s);
        let replace = match &best {
            None => true,
            Some((bc, bs)) => match c.cmp(bc) {
                Ordering::Less => true,
                Ordering::Equal => set_order(s, *bs) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if replace {
            best = Some((c, s));
        }
    }
    Ok(best)
}
