//! Spanning-tree polytope with degree bounds on a laminar family.

use std::cmp::Ordering;

use super::{row, LpFamily, RowTag, SeparationResult, Violation};
use crate::bits::{bit, count, full, set_order};
use crate::error::{Error, Result};
use crate::numeric::{Constraint, Rational, Relation};
use crate::structures::{Graph, LaminarForest};

/// Exhaustive subtour separation enumerates `2^n` vertex sets.
pub const MAX_SEPARATION_VERTICES: usize = 20;

/// Most violated subtour row `x(E(U)) <= |U| - |F(U)| - 1` over
/// `2 <= |U| <= n-1`. `x[i]` is the value of edge `undecided[i]`.
///
/// Ties go to the smaller set under [`set_order`].
pub fn separate_spanning_tree(graph: &Graph, undecided: &[usize], fixed: &[usize], x: &[Rational]) -> Result<SeparationResult> {
    let n = graph.n();
    if n > MAX_SEPARATION_VERTICES {
        return Err(Error::Guard(format!(
            "exhaustive subtour separation supports at most {MAX_SEPARATION_VERTICES} vertices, got {n}"
        )));
    }
    assert_eq!(undecided.len(), x.len());
    // adj[v]: (w, Some(value)) for an undecided edge, (w, None) for a fixed one.
    let mut adj: Vec<Vec<(usize, Option<&Rational>)>> = vec![Vec::new(); n];
    for (i, &e) in undecided.iter().enumerate() {
        if x[i].is_zero() {
            continue;
        }
        let ed = graph.edge(e);
        adj[ed.u].push((ed.v, Some(&x[i])));
        adj[ed.v].push((ed.u, Some(&x[i])));
    }
    for &e in fixed {
        let ed = graph.edge(e);
        adj[ed.u].push((ed.v, None));
        adj[ed.v].push((ed.u, None));
    }

    let mut set: u64 = 0;
    let mut inside = Rational::zero();
    let mut fixed_inside: i64 = 0;
    let mut best: Option<(Rational, u64, i64)> = None;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let adding = set & bit(v) == 0;
        if !adding {
            set ^= bit(v);
        }
        for &(w, val) in &adj[v] {
            if set & bit(w) == 0 {
                continue;
            }
            match (val, adding) {
                (Some(x), true) => inside += x,
                (Some(x), false) => inside -= x,
                (None, true) => fixed_inside += 1,
                (None, false) => fixed_inside -= 1,
            }
        }
        if adding {
            set |= bit(v);
        }
        let size = count(set);
        if size < 2 || size + 1 > n {
            continue;
        }
        let rhs = Rational::from(size as i64 - fixed_inside - 1);
        if inside <= rhs {
            continue;
        }
        let viol = &inside - &rhs;
        let better = match &best {
            None => true,
            Some((bv, bs, _)) => match viol.cmp(bv) {
                Ordering::Greater => true,
                Ordering::Equal => set_order(set, *bs) == Ordering::Less,
                Ordering::Less => false,
            },
        };
        if better {
            best = Some((viol, set, fixed_inside));
        }
    }
    let Some((_, set, fixed_inside)) = best else {
        return Ok(SeparationResult::Feasible);
    };
    let coeffs: Vec<Rational> = undecided
        .iter()
        .map(|&e| if graph.edge(e).inside(set) { Rational::one() } else { Rational::zero() })
        .collect();
    let rhs = Rational::from(count(set) as i64 - fixed_inside - 1);
    let c = row(coeffs, Relation::Le, rhs.clone());
    Ok(SeparationResult::Violated(Violation {
        tag: RowTag::Subtour { set },
        lhs: c.lhs(x),
        rhs,
        row: c,
    }))
}

/// Working LP of one MCST iteration: variables are the undecided edges.
#[derive(Debug, Clone)]
pub struct McstLp<'a> {
    pub graph: &'a Graph,
    pub undecided: Vec<usize>,
    pub fixed: Vec<usize>,
    /// `(node id, vertex set, current bound)` for every alive node.
    pub degree_rows: Vec<(usize, u64, Rational)>,
}

impl<'a> McstLp<'a> {
    pub fn new(graph: &'a Graph, undecided: Vec<usize>, fixed: Vec<usize>, forest: &LaminarForest) -> Self {
        let degree_rows = forest
            .alive()
            .into_iter()
            .map(|id| (id, forest.vertices(id), forest.bound(id).clone()))
            .collect();
        McstLp {
            graph,
            undecided,
            fixed,
            degree_rows,
        }
    }

    /// Coefficients of `x(δ(S))` over the undecided edges.
    pub fn cut_row(&self, set: u64) -> Vec<Rational> {
        self.undecided
            .iter()
            .map(|&e| if self.graph.edge(e).crosses(set) { Rational::one() } else { Rational::zero() })
            .collect()
    }
}

impl LpFamily for McstLp<'_> {
    fn num_vars(&self) -> usize {
        self.undecided.len()
    }

    fn costs(&self) -> Vec<Rational> {
        self.undecided.iter().map(|&e| self.graph.edge(e).cost.clone()).collect()
    }

    fn base_rows(&self) -> Vec<(RowTag, Constraint)> {
        let total = self.graph.n() as i64 - self.fixed.len() as i64 - 1;
        let mut rows = vec![(
            RowTag::TreeTotal,
            row(vec![Rational::one(); self.undecided.len()], Relation::Eq, Rational::from(total)),
        )];
        for (id, set, b) in &self.degree_rows {
            rows.push((RowTag::Degree { node: *id }, row(self.cut_row(*set), Relation::Le, b.clone())));
        }
        rows
    }

    fn separate(&self, x: &[Rational]) -> Result<SeparationResult> {
        separate_spanning_tree(self.graph, &self.undecided, &self.fixed, x)
    }
}

/// Sets `b(S) <- x(δ_{E'}(S))` for every alive node. Returns the changed
/// nodes as `(id, old, new)`. A load above the bound means the LP solution
/// was not feasible, which is an invariant failure.
pub fn tighten_degree_bounds(
    forest: &mut LaminarForest,
    graph: &Graph,
    undecided: &[usize],
    x: &[Rational],
) -> Result<Vec<(usize, Rational, Rational)>> {
    let mut changed = Vec::new();
    for id in forest.alive() {
        let set = forest.vertices(id);
        let mut load = Rational::zero();
        for (i, &e) in undecided.iter().enumerate() {
            if graph.edge(e).crosses(set) {
                load += &x[i];
            }
        }
        let old = forest.bound(id).clone();
        match load.cmp(&old) {
            Ordering::Greater => {
                return Err(Error::Invariant(format!("node {id} has load {load} above bound {old}")));
            }
            Ordering::Less => {
                forest.set_bound(id, load.clone());
                changed.push((id, old, load));
            }
            Ordering::Equal => {}
        }
    }
    Ok(changed)
}

/// Edge ids of each biconnected block of `graph`, every block sorted, blocks
/// ordered by smallest edge id. Parallel edges share a block.
pub fn biconnected_blocks(graph: &Graph) -> Vec<Vec<usize>> {
    struct Walk<'g> {
        graph: &'g Graph,
        adj: Vec<Vec<(usize, usize)>>,
        disc: Vec<usize>,
        low: Vec<usize>,
        timer: usize,
        stack: Vec<usize>,
        seen_edge: Vec<bool>,
        blocks: Vec<Vec<usize>>,
    }
    impl Walk<'_> {
        fn dfs(&mut self, v: usize, parent_edge: Option<usize>) {
            self.timer += 1;
            self.disc[v] = self.timer;
            self.low[v] = self.timer;
            for k in 0..self.adj[v].len() {
                let (w, e) = self.adj[v][k];
                if Some(e) == parent_edge || self.seen_edge[e] {
                    continue;
                }
                self.seen_edge[e] = true;
                self.stack.push(e);
                if self.disc[w] == 0 {
                    self.dfs(w, Some(e));
                    self.low[v] = self.low[v].min(self.low[w]);
                    if self.low[w] >= self.disc[v] {
                        let mut block = Vec::new();
                        while let Some(f) = self.stack.pop() {
                            block.push(f);
                            if f == e {
                                break;
                            }
                        }
                        block.sort_unstable();
                        self.blocks.push(block);
                    }
                } else {
                    self.low[v] = self.low[v].min(self.disc[w]);
                }
            }
        }
    }
    let n = graph.n();
    let mut adj = vec![Vec::new(); n];
    for e in graph.edges() {
        adj[e.u].push((e.v, e.id));
        adj[e.v].push((e.u, e.id));
    }
    let mut walk = Walk {
        graph,
        adj,
        disc: vec![0; n],
        low: vec![0; n],
        timer: 0,
        stack: Vec::new(),
        seen_edge: vec![false; graph.m()],
        blocks: Vec::new(),
    };
    for v in 0..n {
        if walk.disc[v] == 0 {
            walk.dfs(v, None);
        }
    }
    let _ = walk.graph;
    let mut blocks = walk.blocks;
    blocks.sort_by_key(|b| b[0]);
    blocks
}

/// Membership of `x` (indexed by edge id) in the spanning-tree polytope of
/// a connected graph, decided block by block: a spanning tree is exactly a
/// union of spanning trees of the blocks, so the polytope is the product of
/// the block polytopes. Each block is separated exhaustively.
pub fn spanning_tree_membership_by_blocks(graph: &Graph, x: &[Rational]) -> Result<SeparationResult> {
    if x.len() != graph.m() {
        return Err(Error::Instance(format!("{} values for {} edges", x.len(), graph.m())));
    }
    if x.iter().any(|v| v.is_negative() || *v > Rational::one()) {
        return Err(Error::Instance("edge values must lie in [0, 1]".into()));
    }
    if !graph.is_connected_with(0..graph.m()) {
        return Ok(SeparationResult::Violated(total_violation(graph, &(0..graph.m()).collect::<Vec<_>>(), 0, x)));
    }
    for block in biconnected_blocks(graph) {
        let mut verts: Vec<usize> = Vec::new();
        for &e in &block {
            let ed = graph.edge(e);
            for w in [ed.u, ed.v] {
                if !verts.contains(&w) {
                    verts.push(w);
                }
            }
        }
        verts.sort_unstable();
        let local = |w: usize| verts.binary_search(&w).expect("block vertex");
        let mut sub = Graph::new(verts.len())?;
        for &e in &block {
            let ed = graph.edge(e);
            sub.add_edge(local(ed.u), local(ed.v), ed.cost.clone())?;
        }
        let vals: Vec<Rational> = block.iter().map(|&e| x[e].clone()).collect();
        let target = Rational::from(verts.len() as i64 - 1);
        let total: Rational = vals.iter().sum();
        if total != target {
            let global_set = verts.iter().fold(0u64, |m, &w| m | bit(w));
            return Ok(SeparationResult::Violated(total_violation(graph, &block, global_set, x)));
        }
        let ids: Vec<usize> = (0..block.len()).collect();
        if let SeparationResult::Violated(v) = separate_spanning_tree(&sub, &ids, &[], &vals)? {
            let RowTag::Subtour { set } = v.tag else {
                unreachable!("subtour separator only reports subtour rows")
            };
            let global_set = crate::bits::bits(set).fold(0u64, |m, i| m | bit(verts[i]));
            let coeffs: Vec<Rational> = graph
                .edges()
                .iter()
                .map(|e| if e.inside(global_set) { Rational::one() } else { Rational::zero() })
                .collect();
            let c = row(coeffs, Relation::Le, Rational::from(count(global_set) as i64 - 1));
            return Ok(SeparationResult::Violated(Violation {
                tag: RowTag::Subtour { set: global_set },
                lhs: c.lhs(x),
                rhs: c.rhs.clone(),
                row: c,
            }));
        }
    }
    Ok(SeparationResult::Feasible)
}

fn total_violation(graph: &Graph, edges: &[usize], set: u64, x: &[Rational]) -> Violation {
    let coeffs: Vec<Rational> = (0..graph.m())
        .map(|e| if edges.contains(&e) { Rational::one() } else { Rational::zero() })
        .collect();
    let size = if set == 0 { graph.n() } else { count(set & full(graph.n())) };
    let c = row(coeffs, Relation::Eq, Rational::from(size as i64 - 1));
    Violation {
        tag: RowTag::TreeTotal,
        lhs: c.lhs(x),
        rhs: c.rhs.clone(),
        row: c,
    }
}
