use serde::{Deserialize, Serialize};

use crate::bits::{count, full, is_subset};
use crate::error::{Error, Result};
use crate::structures::matroid::MatroidOracle;
use crate::structures::setfn::{supermodular_witness, MAX_GROUND};

/// Largest explicitly tabulated lattice.
pub const MAX_EXPLICIT_MEMBERS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitOrder {
    pub leq: Vec<Vec<bool>>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeShape {
    /// All subsets of the ground set, member index = bitmask, ordered by
    /// inclusion with meet `&` and join `|`, and `rho` the identity.
    Powerset,
    Explicit(ExplicitOrder),
}

/// A finite lattice of members with a set map `rho` into the ground set
/// and an integer rank on members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeOracle {
    ground: usize,
    rho: Vec<u64>,
    rank: Vec<i64>,
    shape: LatticeShape,
}

impl LatticeOracle {
    /// Builds an explicit lattice from its order and operation tables, and
    /// checks every axiom exhaustively.
    pub fn explicit(
        ground: usize,
        rho: Vec<u64>,
        rank: Vec<i64>,
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let m = rho.len();
        if m == 0 {
            return Err(Error::Instance("lattice has no members".into()));
        }
        if m > MAX_EXPLICIT_MEMBERS {
            return Err(Error::Guard(format!(
                "explicit lattice with {m} members exceeds {MAX_EXPLICIT_MEMBERS}"
            )));
        }
        if ground > 64 {
            return Err(Error::Guard(format!("lattice ground set of {ground} elements")));
        }
        if rank.len() != m || meet.len() != m || join.len() != m {
            return Err(Error::Instance("lattice tables have inconsistent sizes".into()));
        }
        for i in 0..m {
            if meet[i].len() != m || join[i].len() != m {
                return Err(Error::Instance(format!("lattice table row {i} has the wrong width")));
            }
            if meet[i].iter().chain(&join[i]).any(|&v| v >= m) {
                return Err(Error::Instance(format!("lattice table row {i} names a missing member")));
            }
            if !is_subset(rho[i], full(ground)) {
                return Err(Error::Instance(format!("rho of member {i} leaves the ground set")));
            }
        }
        // a <= b iff a ∧ b = a.
        let leq: Vec<Vec<bool>> = (0..m)
            .map(|a| (0..m).map(|b| meet[a][b] == a).collect())
            .collect();
        let lat = LatticeOracle {
            ground,
            rho,
            rank,
            shape: LatticeShape::Explicit(ExplicitOrder { leq, meet, join }),
        };
        lat.validate()?;
        Ok(lat)
    }

    /// The lattice of all subsets with a given rank table.
    pub fn powerset(ground: usize, rank: Vec<i64>) -> Result<Self> {
        if ground > MAX_GROUND {
            return Err(Error::Guard(format!(
                "powerset lattice on {ground} elements exceeds {MAX_GROUND}"
            )));
        }
        if rank.len() != 1usize << ground {
            return Err(Error::Instance("powerset rank table has the wrong size".into()));
        }
        let rho = (0..=full(ground)).collect();
        let lat = LatticeOracle {
            ground,
            rho,
            rank,
            shape: LatticeShape::Powerset,
        };
        lat.validate()?;
        Ok(lat)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn rho(&self, a: usize) -> u64 {
        self.rho[a]
    }

    pub fn rank(&self, a: usize) -> i64 {
        self.rank[a]
    }

    pub fn ranks(&self) -> &[i64] {
        &self.rank
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        match &self.shape {
            LatticeShape::Powerset => is_subset(a as u64, b as u64),
            LatticeShape::Explicit(o) => o.leq[a][b],
        }
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        match &self.shape {
            LatticeShape::Powerset => a & b,
            LatticeShape::Explicit(o) => o.meet[a][b],
        }
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        match &self.shape {
            LatticeShape::Powerset => a | b,
            LatticeShape::Explicit(o) => o.join[a][b],
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |axiom: &str, detail: String| Err(Error::Instance(format!("lattice {axiom} fails: {detail}")));
        if let Some(a) = (0..self.len()).find(|&a| self.rank[a] < 0) {
            return fail("rank non-negativity", format!("member {a}"));
        }
        match &self.shape {
            LatticeShape::Powerset => {
                // Order, operations, consecutiveness and submodularity of rho
                // are identities for the subset lattice; only the rank can fail.
                if let Some((a, b)) = supermodular_witness(self.ground, &self.rank) {
                    return fail("rank supermodularity", format!("members {a:#b}, {b:#b}"));
                }
            }
            LatticeShape::Explicit(o) => {
                let m = self.len();
                for a in 0..m {
                    if !o.leq[a][a] {
                        return fail("reflexivity", format!("member {a}"));
                    }
                    for b in 0..m {
                        if a != b && o.leq[a][b] && o.leq[b][a] {
                            return fail("antisymmetry", format!("members {a}, {b}"));
                        }
                        if o.meet[a][b] != o.meet[b][a] || o.join[a][b] != o.join[b][a] {
                            return fail("commutativity", format!("members {a}, {b}"));
                        }
                        let (mt, jn) = (o.meet[a][b], o.join[a][b]);
                        if !(o.leq[mt][a] && o.leq[mt][b] && o.leq[a][jn] && o.leq[b][jn]) {
                            return fail("meet/join bounds", format!("members {a}, {b}"));
                        }
                        if (self.rho[jn] | self.rho[mt]) & !(self.rho[a] | self.rho[b]) != 0 {
                            return fail("submodularity of rho", format!("members {a}, {b}"));
                        }
                        if self.rank[a] + self.rank[b] > self.rank[mt] + self.rank[jn] {
                            return fail("rank supermodularity", format!("members {a}, {b}"));
                        }
                    }
                }
                for a in 0..m {
                    for b in 0..m {
                        if !o.leq[a][b] {
                            continue;
                        }
                        for c in 0..m {
                            if !o.leq[b][c] {
                                continue;
                            }
                            if !o.leq[a][c] {
                                return fail("transitivity", format!("members {a}, {b}, {c}"));
                            }
                            if !is_subset(self.rho[a] & self.rho[c], self.rho[b]) {
                                return fail("consecutive property", format!("members {a} <= {b} <= {c}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `S < T` implies `|rho(S)| < |rho(T)|`. Returns a violating pair.
    pub fn monotonicity_witness(&self) -> Option<(usize, usize)> {
        match &self.shape {
            // Strict inclusion strictly increases size.
            LatticeShape::Powerset => None,
            LatticeShape::Explicit(o) => {
                let m = self.len();
                for a in 0..m {
                    for b in 0..m {
                        if a != b && o.leq[a][b] && count(self.rho[a]) >= count(self.rho[b]) {
                            return Some((a, b));
                        }
                    }
                }
                None
            }
        }
    }

    /// The order coincides with inclusion of `rho` images.
    pub fn is_inclusion_ordered(&self) -> bool {
        match &self.shape {
            LatticeShape::Powerset => true,
            LatticeShape::Explicit(o) => (0..self.len())
                .all(|a| (0..self.len()).all(|b| o.leq[a][b] == is_subset(self.rho[a], self.rho[b]))),
        }
    }

    /// Checks supermodularity of `r'(S) = r(S) - |fixed ∩ rho(S)|`.
    pub fn residual_supermodular_witness(&self, fixed: u64) -> Option<(usize, usize)> {
        let residual: Vec<i64> = (0..self.len())
            .map(|a| self.rank[a] - count(self.rho[a] & fixed) as i64)
            .collect();
        match &self.shape {
            LatticeShape::Powerset => supermodular_witness(self.ground, &residual)
                .map(|(a, b)| (a as usize, b as usize)),
            LatticeShape::Explicit(_) => {
                for a in 0..self.len() {
                    for b in 0..self.len() {
                        let (mt, jn) = (self.meet(a, b), self.join(a, b));
                        if residual[a] + residual[b] > residual[mt] + residual[jn] {
                            return Some((a, b));
                        }
                    }
                }
                None
            }
        }
    }
}

/// Spanning-set lattice of a matroid: all subsets, rho the identity and
/// rank `r(E) - r(E \ S)`.
pub fn matroid_to_lattice(m: &MatroidOracle) -> Result<LatticeOracle> {
    let n = m.n();
    let all = full(n);
    let rank = (0..=all).map(|s| m.full_rank() - m.rank(all & !s)).collect();
    LatticeOracle::powerset(n, rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_matroid_lattice() {
        let lat = matroid_to_lattice(&MatroidOracle::free(1).unwrap()).unwrap();
        assert_eq!(lat.rank(1), 1);
        assert_eq!(lat.rank(0), 0);
    }

    #[test]
    fn uniform_lattice_full_rank() {
        let lat = matroid_to_lattice(&MatroidOracle::uniform(2, 3).unwrap()).unwrap();
        assert_eq!(lat.rank(0b111), 2);
    }

    #[test]
    fn graphic_triangle_pair() {
        let m = MatroidOracle::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let lat = matroid_to_lattice(&m).unwrap();
        // r(E) - r({e3}) = 2 - 1.
        assert_eq!(lat.rank(0b011), 1);
        assert_eq!(lat.monotonicity_witness(), None);
    }

    /// bottom < a, b < top with incomparable equal-size middles.
    pub(crate) fn diamond() -> LatticeOracle {
        let (bot, top) = (0, 3);
        let rho = vec![0b001, 0b011, 0b101, 0b111];
        let mut meet = vec![vec![0; 4]; 4];
        let mut join = vec![vec![0; 4]; 4];
        for x in 0..4 {
            for y in 0..4 {
                let (lo, hi) = match (x, y) {
                    _ if x == y => (x, x),
                    (p, q) if p == bot || q == bot => (bot, p.max(q)),
                    (p, q) if p == top || q == top => (p.min(q), top),
                    _ => (bot, top),
                };
                meet[x][y] = lo;
                join[x][y] = hi;
            }
        }
        LatticeOracle::explicit(3, rho, vec![1, 1, 1, 1], meet, join).unwrap()
    }

    #[test]
    fn diamond_passes_star() {
        let d = diamond();
        assert_eq!(d.monotonicity_witness(), None);
        assert!(!d.comparable(1, 2));
        assert!(d.is_inclusion_ordered());
    }

    #[test]
    fn equal_size_chain_gives_witness() {
        // Two-element chain with equal rho sizes.
        let meet = vec![vec![0, 0], vec![0, 1]];
        let join = vec![vec![0, 1], vec![1, 1]];
        let lat = LatticeOracle::explicit(2, vec![0b01, 0b10], vec![0, 0], meet, join);
        // The consecutive property holds trivially with two members.
        let lat = lat.unwrap();
        assert_eq!(lat.monotonicity_witness(), Some((0, 1)));
    }

    #[test]
    fn rejects_bad_rank() {
        let meet = vec![vec![0, 0], vec![0, 1]];
        let join = vec![vec![0, 1], vec![1, 1]];
        assert!(LatticeOracle::explicit(2, vec![0b01, 0b11], vec![0, -1], meet, join).is_err());
        // Rank 1 on a single top element over a 2-element powerset is not supermodular
        // when both singletons also have rank 1: 1 + 1 > 0 + 1.
        assert!(LatticeOracle::powerset(2, vec![0, 1, 1, 1]).is_err());
    }

    #[test]
    fn rejects_non_consecutive() {
        // Chain 0 < 1 < 2 with rho(0) ∩ rho(2) not inside rho(1).
        let meet = vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]];
        let join = vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]];
        let err = LatticeOracle::explicit(2, vec![0b01, 0b10, 0b11], vec![0, 0, 0], meet, join).unwrap_err();
        assert!(err.to_string().contains("consecutive"));
    }
}
