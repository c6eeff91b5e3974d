use serde::{Deserialize, Serialize};

use crate::bits::{bit, bits, count, full};
use crate::error::{Error, Result};
use crate::structures::graph::UnionFind;
use crate::structures::setfn::{check_table, monotone_witness, submodular_witness};

/// A matroid on `0..n` given by its full rank table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatroidOracle {
    n: usize,
    rank: Vec<i64>,
}

impl MatroidOracle {
    /// Validates every rank axiom exhaustively.
    pub fn from_table(n: usize, rank: Vec<i64>) -> Result<Self> {
        check_table(n, &rank, "matroid rank").map_err(Error::Instance)?;
        if rank[0] != 0 {
            return Err(Error::Instance("matroid rank of the empty set is not 0".into()));
        }
        for e in 0..n {
            let r = rank[bit(e) as usize];
            if !(0..=1).contains(&r) {
                return Err(Error::Instance(format!("matroid rank of {{{e}}} is {r}")));
            }
        }
        if let Some((a, b)) = monotone_witness(n, &rank) {
            return Err(Error::Instance(format!(
                "matroid rank not monotone: r({a:#b}) > r({b:#b})"
            )));
        }
        if let Some((a, b)) = submodular_witness(n, &rank) {
            return Err(Error::Instance(format!(
                "matroid rank not submodular on the pair {a:#b}, {b:#b}"
            )));
        }
        Ok(MatroidOracle { n, rank })
    }

    fn tabulate(n: usize, f: impl Fn(u64) -> i64) -> Result<Self> {
        if n > crate::structures::setfn::MAX_GROUND {
            return Err(Error::Guard(format!("matroid ground set of {n} elements")));
        }
        let rank = (0..=full(n)).map(f).collect();
        Self::from_table(n, rank)
    }

    pub fn free(n: usize) -> Result<Self> {
        Self::tabulate(n, |s| count(s) as i64)
    }

    pub fn uniform(k: usize, n: usize) -> Result<Self> {
        Self::tabulate(n, |s| count(s).min(k) as i64)
    }

    /// Graphic matroid: rank is the size of a spanning forest.
    pub fn graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::Instance(format!("edge ({u},{v}) outside 0..{vertices}")));
            }
        }
        Self::tabulate(edges.len(), |s| {
            let mut uf = UnionFind::new(vertices);
            bits(s).filter(|&e| uf.union(edges[e].0, edges[e].1)).count() as i64
        })
    }

    /// Partition matroid: at most `cap` elements from each block.
    pub fn partition(n: usize, blocks: &[(u64, usize)]) -> Result<Self> {
        let covered = blocks.iter().fold(0u64, |m, (b, _)| {
            m | b
        });
        let mut total = 0;
        for (b, _) in blocks {
            total += count(*b);
        }
        if covered != full(n) || total != n {
            return Err(Error::Instance("partition blocks must cover the ground set disjointly".into()));
        }
        Self::tabulate(n, |s| {
            blocks
                .iter()
                .map(|&(b, cap)| count(s & b).min(cap) as i64)
                .sum()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self, set: u64) -> i64 {
        self.rank[set as usize]
    }

    pub fn table(&self) -> &[i64] {
        &self.rank
    }

    pub fn full_rank(&self) -> i64 {
        self.rank(full(self.n))
    }

    pub fn is_basis(&self, set: u64) -> bool {
        count(set) as i64 == self.full_rank() && self.rank(set) == self.full_rank()
    }

    /// Sets containing a basis.
    pub fn is_spanning(&self, set: u64) -> bool {
        self.rank(set) == self.full_rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_graphic_ranks() {
        let m = MatroidOracle::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(m.full_rank(), 2);
        assert_eq!(m.rank(0b100), 1);
        assert!(m.is_basis(0b011));
        assert!(!m.is_basis(0b111));
    }

    #[test]
    fn rejects_non_matroid_tables() {
        // r({0}) = 2 breaks the singleton axiom.
        assert!(MatroidOracle::from_table(1, vec![0, 2]).is_err());
        // Not submodular: r = |S| choose-ish jump.
        assert!(MatroidOracle::from_table(2, vec![0, 0, 0, 1]).is_err());
        // Not monotone.
        assert!(MatroidOracle::from_table(2, vec![0, 1, 1, 0]).is_err());
    }

    #[test]
    fn uniform_and_partition() {
        let u = MatroidOracle::uniform(2, 3).unwrap();
        assert_eq!(u.full_rank(), 2);
        let p = MatroidOracle::partition(4, &[(0b0011, 1), (0b1100, 2)]).unwrap();
        assert_eq!(p.full_rank(), 3);
        assert_eq!(p.rank(0b0011), 1);
        assert!(MatroidOracle::partition(4, &[(0b0011, 1)]).is_err());
    }
}
