use serde::{Deserialize, Serialize};

use crate::bits::{bit, count, full};
use crate::error::{Error, Result};
use crate::numeric::Rational;

/// Largest vertex count; vertex sets are `u64` masks.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub cost: Rational,
}

impl Edge {
    pub fn mask(&self) -> u64 {
        bit(self.u) | bit(self.v)
    }

    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Exactly one endpoint in `set`.
    pub fn crosses(&self, set: u64) -> bool {
        ((set >> self.u) & 1) != ((set >> self.v) & 1)
    }

    /// Both endpoints in `set`.
    pub fn inside(&self, set: u64) -> bool {
        self.mask() & !set == 0
    }

    pub fn touches(&self, set: u64) -> bool {
        self.mask() & set != 0
    }
}

/// Undirected multigraph on vertices `0..n`. Edge ids equal their index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::Guard(format!(
                "graph has {n} vertices, at most {MAX_VERTICES} supported"
            )));
        }
        Ok(Graph {
            n,
            edges: Vec::new(),
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for (u, v, c) in edges {
            g.add_edge(*u, *v, c.clone())?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cost: Rational) -> Result<usize> {
        if u >= self.n || v >= self.n {
            return Err(Error::Instance(format!(
                "edge ({u},{v}) has an endpoint outside 0..{}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::Instance(format!("self-loop at vertex {u}")));
        }
        let id = self.edges.len();
        self.edges.push(Edge { id, u, v, cost });
        Ok(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn all_vertices(&self) -> u64 {
        full(self.n)
    }

    pub fn cost_of(&self, ids: &[usize]) -> Rational {
        ids.iter().map(|&e| &self.edges[e].cost).sum()
    }

    /// Number of edges of `ids` crossing `set`.
    pub fn cut_load(&self, ids: &[usize], set: u64) -> usize {
        ids.iter().filter(|&&e| self.edges[e].crosses(set)).count()
    }

    /// `true` if `ids` is a spanning tree of the vertex set.
    pub fn is_spanning_tree(&self, ids: &[usize]) -> bool {
        if self.n == 0 {
            return ids.is_empty();
        }
        if ids.len() != self.n - 1 {
            return false;
        }
        let mut uf = UnionFind::new(self.n);
        ids.iter().all(|&e| {
            let edge = &self.edges[e];
            uf.union(edge.u, edge.v)
        })
    }

    /// `true` if the subgraph on `ids` connects all vertices.
    pub fn is_connected_with(&self, ids: impl IntoIterator<Item = usize>) -> bool {
        let mut uf = UnionFind::new(self.n);
        let mut comps = self.n;
        for e in ids {
            let edge = &self.edges[e];
            if uf.union(edge.u, edge.v) {
                comps -= 1;
            }
        }
        comps <= 1
    }

    /// Vertex count of a mask restricted to this graph.
    pub fn size_of(&self, set: u64) -> usize {
        count(set & self.all_vertices())
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the classes of `a` and `b`; `false` if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        let one = Rational::one();
        Graph::from_edges(3, &[(0, 1, one.clone()), (1, 2, one.clone()), (0, 2, one)]).unwrap()
    }

    #[test]
    fn rejects_loops_and_bad_endpoints() {
        let mut g = Graph::new(2).unwrap();
        assert!(g.add_edge(0, 0, Rational::one()).is_err());
        assert!(g.add_edge(0, 2, Rational::one()).is_err());
        assert!(Graph::new(65).is_err());
    }

    #[test]
    fn parallel_edges_allowed() {
        let mut g = Graph::new(2).unwrap();
        g.add_edge(0, 1, Rational::one()).unwrap();
        g.add_edge(1, 0, Rational::one()).unwrap();
        assert_eq!(g.m(), 2);
        assert!(g.is_spanning_tree(&[1]));
        assert!(!g.is_spanning_tree(&[0, 1]));
    }

    #[test]
    fn crossing_and_trees() {
        let g = triangle();
        assert!(g.edge(0).crosses(0b001));
        assert!(!g.edge(1).crosses(0b001));
        assert!(g.edge(0).inside(0b011));
        assert!(g.is_spanning_tree(&[0, 1]));
        assert!(!g.is_spanning_tree(&[0]));
        assert_eq!(g.cut_load(&[0, 1, 2], 0b001), 2);
    }
}
