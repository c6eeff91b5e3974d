use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::structures::{Graph, UnionFind};

/// Enumeration refuses graphs with more spanning trees than this.
pub const MAX_TREES: u64 = 1_000_000;

/// Number of spanning trees by the matrix-tree theorem, computed exactly.
pub fn kirchhoff_count(graph: &Graph) -> Rational {
    let n = graph.n();
    if n <= 1 {
        return Rational::one();
    }
    let k = n - 1;
    let mut a = vec![vec![Rational::zero(); k]; k];
    for e in graph.edges() {
        let (u, v) = (e.u, e.v);
        if u > 0 {
            a[u - 1][u - 1] += Rational::one();
        }
        if v > 0 {
            a[v - 1][v - 1] += Rational::one();
        }
        if u > 0 && v > 0 {
            a[u - 1][v - 1] -= Rational::one();
            a[v - 1][u - 1] -= Rational::one();
        }
    }
    let mut det = Rational::one();
    for col in 0..k {
        let Some(p) = (col..k).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..k {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            let (top, rest) = a.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &f * y;
            }
        }
    }
    det
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrder {
    Forward,
    Reverse,
}

/// Calls `f` on every spanning tree (edge ids ascending) exactly once.
/// Returns the number of trees visited.
pub fn for_each_spanning_tree(graph: &Graph, order: EdgeOrder, mut f: impl FnMut(&[usize])) -> Result<u64> {
    let expected = kirchhoff_count(graph);
    if expected > Rational::from(MAX_TREES as i64) {
        return Err(Error::Guard(format!("graph has {expected} spanning trees, limit {MAX_TREES}")));
    }
    let n = graph.n();
    let mut ids: Vec<usize> = (0..graph.m()).collect();
    if order == EdgeOrder::Reverse {
        ids.reverse();
    }
    let mut chosen = Vec::new();
    let mut visited = 0u64;
    if n == 0 {
        return Ok(0);
    }
    let mut buf = Vec::new();
    rec(graph, &ids, 0, &mut chosen, order, &mut |t: &[usize]| {
        buf.clear();
        buf.extend_from_slice(t);
        buf.sort_unstable();
        visited += 1;
        f(&buf);
    });
    if Rational::from(visited as i64) != expected {
        return Err(Error::Invariant(format!("enumerated {visited} trees, determinant says {expected}")));
    }
    Ok(visited)
}

fn components(graph: &Graph, edges: impl Iterator<Item = usize>) -> usize {
    let mut uf = UnionFind::new(graph.n());
    let mut comps = graph.n();
    for e in edges {
        let ed = graph.edge(e);
        if uf.union(ed.u, ed.v) {
            comps -= 1;
        }
    }
    comps
}

fn rec(graph: &Graph, ids: &[usize], pos: usize, chosen: &mut Vec<usize>, order: EdgeOrder, f: &mut dyn FnMut(&[usize])) {
    let n = graph.n();
    if chosen.len() + 1 == n {
        f(chosen);
        return;
    }
    if pos == ids.len() || chosen.len() + (ids.len() - pos) + 1 < n {
        return;
    }
    let e = ids[pos];
    let can_take = components(graph, chosen.iter().copied().chain(std::iter::once(e))) == n - chosen.len() - 1;
    // Skipping e is allowed only if the rest can still span.
    let can_skip = components(graph, chosen.iter().copied().chain(ids[pos + 1..].iter().copied())) == 1;
    let take = |chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])| {
        if can_take {
            chosen.push(e);
            rec(graph, ids, pos + 1, chosen, order, f);
            chosen.pop();
        }
    };
    match order {
        EdgeOrder::Forward => {
            take(chosen, f);
            if can_skip {
                rec(graph, ids, pos + 1, chosen, order, f);
            }
        }
        EdgeOrder::Reverse => {
            if can_skip {
                rec(graph, ids, pos + 1, chosen, order, f);
            }
            take(chosen, f);
        }
    }
}

pub fn enumerate_spanning_trees(graph: &Graph) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_spanning_tree(graph, EdgeOrder::Forward, |t| out.push(t.to_vec()))?;
    Ok(out)
}
