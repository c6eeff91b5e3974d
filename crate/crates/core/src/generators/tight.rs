//! Crossing bipartite edge cover on a `4n`-cycle, the tight example for the
//! intersection algorithm.

use crate::bits::{bit, bits, count, full};
use crate::error::{Error, Result};
use crate::lp::CoverLp;
use crate::numeric::Rational;
use crate::structures::{ContraPolymatroidPair, CrossingConstraint, IntersectionInstance};

/// Cycle edges `i = (i, i+1 mod len)`; vertex `v` meets edges `v-1` and `v`.
/// `r(S)` counts vertices of the given side (`parity` 0 for even vertices,
/// 1 for odd) with both edges in `S`. Stars on one side are disjoint, so
/// covering `r` is covering that side.
pub fn edge_cover_rank(len: usize, parity: usize) -> Vec<i64> {
    let star = |v: usize| bit(v) | bit((v + len - 1) % len);
    (0..=full(len))
        .map(|s| (parity..len).step_by(2).filter(|&v| s & star(v) == star(v)).count() as i64)
        .collect()
}

/// Even edges and odd edges: the two perfect matchings of the cycle.
pub fn cycle_matchings(len: usize) -> [u64; 2] {
    let even = (0..len).step_by(2).fold(0u64, |s, e| s | bit(e));
    [even, full(len) & !even]
}

pub fn gen_edge_cover_tight(n: usize) -> Result<IntersectionInstance> {
    if n == 0 {
        return Err(Error::Instance("edge cover cycle needs n >= 1".into()));
    }
    if n > 3 {
        return Err(Error::Guard(format!("edge cover cycle with n = {n} exceeds 3")));
    }
    let len = 4 * n;
    let pair = ContraPolymatroidPair::new(len, edge_cover_rank(len, 0), edge_cover_rank(len, 1))?;
    let b = Rational::from(n);
    let constraints = cycle_matchings(len)
        .into_iter()
        .map(|m| CrossingConstraint::upper(m, b.clone()))
        .collect();
    IntersectionInstance::new(pair, vec![Rational::one(); len], constraints)
}

/// The first-iteration LP of an intersection instance.
pub fn initial_cover_lp(inst: &IntersectionInstance) -> CoverLp<'_> {
    CoverLp {
        inst,
        undecided: full(inst.n()),
        fixed: 0,
        active: (0..inst.constraints.len()).map(|i| (i, inst.upper(i).clone())).collect(),
    }
}

/// Largest `|sol ∩ E_i|` over the constraint sets.
pub fn max_load(inst: &IntersectionInstance, sol: u64) -> usize {
    inst.constraints.iter().map(|c| count(c.elements & sol)).max().unwrap_or(0)
}

/// Elements of `sol` in each constraint set.
pub fn loads(inst: &IntersectionInstance, sol: u64) -> Vec<usize> {
    inst.constraints.iter().map(|c| bits(c.elements & sol).count()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossing::run_intersection;
    use crate::lp::pin_optimum;
    use crate::oracles::brute_subset_opt;

    #[test]
    fn four_cycle_rank() {
        let even = edge_cover_rank(4, 0);
        let odd = edge_cover_rank(4, 1);
        // Vertex 0 meets edges 3 and 0, vertex 1 meets edges 0 and 1.
        assert_eq!(even[0b1001], 1);
        assert_eq!(odd[0b1001], 0);
        assert_eq!(odd[0b0011], 1);
        assert_eq!(even[0b1111], 2);
    }

    #[test]
    fn four_cycle_edge_cover_brute() {
        let inst = gen_edge_cover_tight(1).unwrap();
        let best = brute_subset_opt(4, |s| inst.pair.covers(s), |s| inst.cost_of(s)).unwrap();
        assert_eq!(best.map(|b| b.0), Some(Rational::from(2)));
    }

    #[test]
    fn half_point_is_pinned() {
        for n in [1, 2] {
            let inst = gen_edge_cover_tight(n).unwrap();
            let pin = pin_optimum(&initial_cover_lp(&inst)).unwrap();
            assert_eq!(pin.optimum, Rational::from(2 * n));
            assert!(pin.point.iter().all(|v| *v == Rational::new(1, 2)));
            assert!(pin.pinned(), "{:?}", pin.ranges);
            assert_eq!(pin.auxiliary_solves(), 8 * n);
        }
    }

    #[test]
    fn rounding_doubles_the_bound() {
        let inst = gen_edge_cover_tight(1).unwrap();
        let run = run_intersection(&inst).unwrap();
        assert_eq!(loads(&inst, run.solution), vec![2, 2]);
    }
}
