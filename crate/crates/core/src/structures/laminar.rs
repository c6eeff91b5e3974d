use serde::{Deserialize, Serialize};

use crate::bits::{count, is_subset};
use crate::error::{Error, Result};
use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminarNode {
    pub vertices: u64,
    pub bound: Rational,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub alive: bool,
}

/// A laminar family of vertex sets viewed as a forest, with an explicit
/// linear order on the children of every node and on the roots.
///
/// Node ids are never reused; killed nodes stay in the arena with
/// `alive == false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminarForest {
    nodes: Vec<LaminarNode>,
    roots: Vec<usize>,
}

impl LaminarForest {
    pub fn empty() -> Self {
        LaminarForest {
            nodes: Vec::new(),
            roots: Vec::new(),
        }
    }

    /// Builds the forest from sets in input order. Children and roots are
    /// ordered by input position. Two equal sets are allowed; the later one
    /// becomes a child of the earlier one.
    pub fn from_sets(sets: Vec<(u64, Rational)>) -> Result<Self> {
        for (i, (s, _)) in sets.iter().enumerate() {
            if *s == 0 {
                return Err(Error::Instance(format!("laminar set {i} is empty")));
            }
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let (a, b) = (sets[i].0, sets[j].0);
                if a & b != 0 && !is_subset(a, b) && !is_subset(b, a) {
                    return Err(Error::Instance(format!(
                        "sets {i} and {j} cross, family is not laminar"
                    )));
                }
            }
        }
        // `j` is an ancestor candidate of `i`.
        let above = |j: usize, i: usize| {
            let (si, sj) = (sets[i].0, sets[j].0);
            (si != sj && is_subset(si, sj)) || (si == sj && j < i)
        };
        let mut nodes: Vec<LaminarNode> = sets
            .iter()
            .map(|(s, b)| LaminarNode {
                vertices: *s,
                bound: b.clone(),
                parent: None,
                children: Vec::new(),
                alive: true,
            })
            .collect();
        let mut roots = Vec::new();
        for i in 0..sets.len() {
            let parent = (0..sets.len())
                .filter(|&j| j != i && above(j, i))
                .min_by(|&a, &b| {
                    count(sets[a].0)
                        .cmp(&count(sets[b].0))
                        .then(b.cmp(&a))
                });
            nodes[i].parent = parent;
            match parent {
                Some(p) => nodes[p].children.push(i),
                None => roots.push(i),
            }
        }
        let forest = LaminarForest { nodes, roots };
        forest.check().map_err(Error::Instance)?;
        Ok(forest)
    }

    pub fn node(&self, id: usize) -> &LaminarNode {
        &self.nodes[id]
    }

    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn is_alive(&self, id: usize) -> bool {
        id < self.nodes.len() && self.nodes[id].alive
    }

    pub fn alive(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].alive).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self, id: usize) -> u64 {
        self.nodes[id].vertices
    }

    pub fn bound(&self, id: usize) -> &Rational {
        &self.nodes[id].bound
    }

    pub fn set_bound(&mut self, id: usize, b: Rational) {
        self.nodes[id].bound = b;
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    /// Ordered child list of `parent`, or the roots for `None`.
    pub fn sibling_list(&self, parent: Option<usize>) -> &[usize] {
        match parent {
            Some(p) => &self.nodes[p].children,
            None => &self.roots,
        }
    }

    fn sibling_list_mut(&mut self, parent: Option<usize>) -> &mut Vec<usize> {
        match parent {
            Some(p) => &mut self.nodes[p].children,
            None => &mut self.roots,
        }
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty()
    }

    pub fn grandchildren(&self, id: usize) -> Vec<usize> {
        self.nodes[id]
            .children
            .iter()
            .flat_map(|&c| self.nodes[c].children.iter().copied())
            .collect()
    }

    /// Distance to the root of the node's tree.
    pub fn level(&self, id: usize) -> Result<usize> {
        if !self.is_alive(id) {
            return Err(Error::Instance(format!("laminar node {id} is not alive")));
        }
        let mut level = 0;
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            level += 1;
            cur = p;
        }
        Ok(level)
    }

    fn position(&self, id: usize) -> usize {
        let parent = self.nodes[id].parent;
        self.sibling_list(parent)
            .iter()
            .position(|&c| c == id)
            .expect("alive node is listed under its parent")
    }

    /// Removes a node and splices its children into its parent's order at
    /// its position.
    pub fn remove_node(&mut self, id: usize) {
        assert!(self.is_alive(id), "removing dead node {id}");
        let parent = self.nodes[id].parent;
        let pos = self.position(id);
        let kids = std::mem::take(&mut self.nodes[id].children);
        for &k in &kids {
            self.nodes[k].parent = parent;
        }
        let list = self.sibling_list_mut(parent);
        list.splice(pos..pos + 1, kids);
        self.nodes[id].alive = false;
        self.nodes[id].parent = None;
        self.debug_check();
    }

    /// Replaces sibling leaves `a` and `b` by a new leaf holding their
    /// union and the sum of their bounds, at `a`'s position. Returns the
    /// new node id.
    pub fn merge_leaves(&mut self, a: usize, b: usize) -> usize {
        assert!(self.is_alive(a) && self.is_alive(b) && a != b);
        assert!(self.is_leaf(a) && self.is_leaf(b), "merging non-leaves");
        let parent = self.nodes[a].parent;
        assert_eq!(parent, self.nodes[b].parent, "merging non-siblings");
        let id = self.nodes.len();
        let node = LaminarNode {
            vertices: self.nodes[a].vertices | self.nodes[b].vertices,
            bound: &self.nodes[a].bound + &self.nodes[b].bound,
            parent,
            children: Vec::new(),
            alive: true,
        };
        self.nodes.push(node);
        let pos = self.position(a);
        let list = self.sibling_list_mut(parent);
        list[pos] = id;
        list.retain(|&c| c != b);
        for old in [a, b] {
            self.nodes[old].alive = false;
            self.nodes[old].parent = None;
        }
        self.debug_check();
        id
    }

    fn debug_check(&self) {
        if cfg!(debug_assertions) {
            if let Err(e) = self.check() {
                panic!("laminar forest invariant broken: {e}");
            }
        }
    }

    fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.nodes[b].parent;
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.nodes[p].parent;
        }
        false
    }

    /// Full structural check: parent links, child lists, containment,
    /// and disjointness of unrelated nodes.
    pub fn check(&self) -> std::result::Result<(), String> {
        let alive = self.alive();
        let mut listed = vec![0usize; self.nodes.len()];
        for p in std::iter::once(None).chain(alive.iter().map(|&i| Some(i))) {
            for &c in self.sibling_list(p) {
                if !self.is_alive(c) {
                    return Err(format!("dead node {c} listed as a child"));
                }
                if self.nodes[c].parent != p {
                    return Err(format!("node {c} listed under {p:?} but has parent {:?}", self.nodes[c].parent));
                }
                listed[c] += 1;
            }
        }
        for &i in &alive {
            if listed[i] != 1 {
                return Err(format!("node {i} listed {} times", listed[i]));
            }
            if let Some(p) = self.nodes[i].parent {
                if !self.is_alive(p) {
                    return Err(format!("node {i} has dead parent {p}"));
                }
                if !is_subset(self.nodes[i].vertices, self.nodes[p].vertices) {
                    return Err(format!("node {i} is not inside its parent {p}"));
                }
            }
        }
        for (x, &a) in alive.iter().enumerate() {
            for &b in &alive[x + 1..] {
                let (sa, sb) = (self.nodes[a].vertices, self.nodes[b].vertices);
                if self.is_ancestor(a, b) || self.is_ancestor(b, a) {
                    continue;
                }
                if sa & sb != 0 {
                    return Err(format!("unrelated nodes {a} and {b} intersect"));
                }
            }
        }
        Ok(())
    }

    /// Splits `subset` into maximal runs of siblings that are adjacent in
    /// their parent's order. Groups are listed by parent (roots first).
    pub fn consecutive_sibling_blocks(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut keyed: Vec<(Option<usize>, usize, usize)> = subset
            .iter()
            .map(|&id| (self.nodes[id].parent, self.position(id), id))
            .collect();
        keyed.sort();
        keyed.dedup();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut last: Option<(Option<usize>, usize)> = None;
        for (parent, pos, id) in keyed {
            match (last, blocks.last_mut()) {
                (Some((lp, lpos)), Some(block)) if lp == parent && lpos + 1 == pos => block.push(id),
                _ => blocks.push(vec![id]),
            }
            last = Some((parent, pos));
        }
        blocks
    }

    /// Every non-empty contiguous run of every sibling list.
    pub fn all_consecutive_blocks(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let parents = std::iter::once(None).chain(self.alive().into_iter().map(Some));
        for p in parents {
            let list = self.sibling_list(p);
            for i in 0..list.len() {
                for j in i..list.len() {
                    out.push(list[i..=j].to_vec());
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::from_indices;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn chain() -> LaminarForest {
        LaminarForest::from_sets(vec![
            (from_indices([1, 2, 3, 4]), r(3)),
            (from_indices([1, 2]), r(2)),
            (from_indices([1]), r(1)),
        ])
        .unwrap()
    }

    #[test]
    fn levels() {
        let f = chain();
        assert_eq!(f.level(0).unwrap(), 0);
        assert_eq!(f.level(1).unwrap(), 1);
        assert_eq!(f.level(2).unwrap(), 2);
    }

    #[test]
    fn dead_node_level_rejected() {
        let mut f = chain();
        f.remove_node(1);
        assert!(f.level(1).is_err());
        assert_eq!(f.level(2).unwrap(), 1);
        assert_eq!(f.children(0), &[2]);
    }

    #[test]
    fn crossing_sets_rejected() {
        let err = LaminarForest::from_sets(vec![(0b011, r(1)), (0b110, r(1))]);
        assert!(err.is_err());
    }

    #[test]
    fn equal_sets_nest_by_order() {
        let f = LaminarForest::from_sets(vec![(0b11, r(1)), (0b11, r(2)), (0b01, r(1))]).unwrap();
        assert_eq!(f.parent(1), Some(0));
        assert_eq!(f.parent(2), Some(1));
    }

    fn star() -> LaminarForest {
        // Parent {0..3} with ordered children A={0}, B={1}, C={2}, D={3}.
        LaminarForest::from_sets(vec![
            (0b1111, r(4)),
            (0b0001, r(1)),
            (0b0010, r(1)),
            (0b0100, r(1)),
            (0b1000, r(1)),
        ])
        .unwrap()
    }

    #[test]
    fn blocks_by_contiguity() {
        let f = star();
        assert_eq!(f.consecutive_sibling_blocks(&[1, 2]), vec![vec![1, 2]]);
        assert_eq!(f.consecutive_sibling_blocks(&[1, 3]), vec![vec![1], vec![3]]);
        assert_eq!(f.consecutive_sibling_blocks(&[1, 2, 4]), vec![vec![1, 2], vec![4]]);
        // 4 children give 10 runs, plus the single root run.
        assert_eq!(f.all_consecutive_blocks().len(), 11);
    }

    #[test]
    fn merge_takes_first_position() {
        let mut f = star();
        let m = f.merge_leaves(2, 4);
        assert_eq!(f.children(0), &[1, m, 3]);
        assert_eq!(f.bound(m), &r(2));
        assert_eq!(f.vertices(m), 0b1010);
        f.check().unwrap();
    }

    #[test]
    fn splice_keeps_order() {
        let mut f = LaminarForest::from_sets(vec![
            (0b111111, r(5)),
            (0b000001, r(1)),
            (0b000110, r(2)),
            (0b000010, r(1)),
            (0b000100, r(1)),
            (0b110000, r(1)),
        ])
        .unwrap();
        assert_eq!(f.children(0), &[1, 2, 5]);
        f.remove_node(2);
        assert_eq!(f.children(0), &[1, 3, 4, 5]);
        f.check().unwrap();
    }
}
