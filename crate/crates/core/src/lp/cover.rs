//! Intersection of two contra-polymatroids with upper side constraints.

use std::cmp::Ordering;

use super::{indicator_row, mask_vars, row, LpFamily, RowTag, SeparationResult, Violation};
use crate::bits::{bits, count, full, set_order};
use crate::error::Result;
use crate::numeric::{Constraint, Rational, Relation};
use crate::structures::{ContraPolymatroidPair, IntersectionInstance};

/// Most violated row `x(S ∩ E') >= r_k(S) - |F ∩ S|` over all `S` and both
/// functions. `x[i]` is the value of the `i`-th element of `undecided`.
///
/// Ties go to the smaller set, then to `r_1`. The reported `function` is 1
/// or 2.
pub fn separate_contra_polymatroid(pair: &ContraPolymatroidPair, undecided: u64, fixed: u64, x: &[Rational]) -> SeparationResult {
    let n = pair.n();
    let vars = mask_vars(undecided);
    assert_eq!(vars.len(), x.len());
    let mut value = vec![Rational::zero(); n];
    for (i, &e) in vars.iter().enumerate() {
        value[e] = x[i].clone();
    }
    let size = 1usize << n;
    let mut sums: Vec<Rational> = vec![Rational::zero(); size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        sums[s] = if value[low].is_zero() { sums[rest].clone() } else { &sums[rest] + &value[low] };
    }
    let mut best: Option<(Rational, u64, usize)> = None;
    for s in 0..size as u64 {
        for k in 1..=2 {
            let rhs = pair.r(k - 1, s) - count(fixed & s) as i64;
            if rhs <= 0 {
                continue;
            }
            let rhs = Rational::from(rhs);
            let lhs = &sums[s as usize];
            if *lhs >= rhs {
                continue;
            }
            let viol = &rhs - lhs;
            let better = match &best {
                None => true,
                Some((bv, bs, _)) => match viol.cmp(bv) {
                    Ordering::Greater => true,
                    Ordering::Equal => set_order(s, *bs) == Ordering::Less,
                    Ordering::Less => false,
                },
            };
            if better {
                best = Some((viol, s, k));
            }
        }
    }
    let Some((_, set, k)) = best else {
        return SeparationResult::Feasible;
    };
    let rhs = Rational::from(pair.r(k - 1, set) - count(fixed & set) as i64);
    let c = row(indicator_row(&vars, set), Relation::Ge, rhs.clone());
    debug_assert!(set & !full(n) == 0);
    SeparationResult::Violated(Violation {
        tag: RowTag::Cover { function: k, set },
        lhs: c.lhs(x),
        rhs,
        row: c,
    })
}

/// Working LP of one intersection iteration.
#[derive(Debug, Clone)]
pub struct CoverLp<'a> {
    pub inst: &'a IntersectionInstance,
    pub undecided: u64,
    pub fixed: u64,
    /// `(constraint index, residual bound b'_i)` for constraints still in W.
    pub active: Vec<(usize, Rational)>,
}

impl CoverLp<'_> {
    pub fn vars(&self) -> Vec<usize> {
        mask_vars(self.undecided)
    }
}

impl LpFamily for CoverLp<'_> {
    fn num_vars(&self) -> usize {
        count(self.undecided)
    }

    fn costs(&self) -> Vec<Rational> {
        bits(self.undecided).map(|e| self.inst.costs[e].clone()).collect()
    }

    fn base_rows(&self) -> Vec<(RowTag, Constraint)> {
        let vars = self.vars();
        self.active
            .iter()
            .map(|(i, b)| {
                let mask = self.inst.constraints[*i].elements;
                (RowTag::Upper { index: *i }, row(indicator_row(&vars, mask), Relation::Le, b.clone()))
            })
            .collect()
    }

    fn separate(&self, x: &[Rational]) -> Result<SeparationResult> {
        Ok(separate_contra_polymatroid(&self.inst.pair, self.undecided, self.fixed, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_to_extreme_point;
    use crate::numeric::q;
    use crate::structures::CrossingConstraint;

    /// `r1(S) = |S|` forces every element; `r2(S) = max(0, |S| - 1)`.
    fn path_pair() -> ContraPolymatroidPair {
        let r1: Vec<i64> = (0..4u64).map(|s| count(s) as i64).collect();
        let r2: Vec<i64> = (0..4u64).map(|s| (count(s) as i64 - 1).max(0)).collect();
        ContraPolymatroidPair::new(2, r1, r2).unwrap()
    }

    #[test]
    fn finds_uncovered_set() {
        let pair = path_pair();
        let SeparationResult::Violated(v) = separate_contra_polymatroid(&pair, 0b11, 0, &[q(1, 2), q(1, 1)]) else {
            panic!("element 0 is under-covered");
        };
        assert_eq!(v.tag, RowTag::Cover { function: 1, set: 0b01 });
        assert_eq!(v.lhs, q(1, 2));
        assert!(v.reverify(&[q(1, 2), q(1, 1)]));
        assert!(separate_contra_polymatroid(&pair, 0b11, 0, &[q(1, 1), q(1, 1)]).is_feasible());
    }

    #[test]
    fn fixed_elements_count_towards_cover() {
        let pair = path_pair();
        assert!(separate_contra_polymatroid(&pair, 0b10, 0b01, &[q(1, 1)]).is_feasible());
        assert!(!separate_contra_polymatroid(&pair, 0b10, 0b01, &[q(1, 2)]).is_feasible());
    }

    #[test]
    fn lp_solves_with_upper_rows() {
        let pair = path_pair();
        let inst = IntersectionInstance::new(
            pair,
            vec![q(1, 1), q(2, 1)],
            vec![CrossingConstraint::upper(0b11, q(2, 1))],
        )
        .unwrap();
        let lp = CoverLp {
            inst: &inst,
            undecided: 0b11,
            fixed: 0,
            active: vec![(0, q(2, 1))],
        };
        let sol = solve_to_extreme_point(&lp).unwrap();
        assert_eq!(*sol.objective(), q(3, 1));
        assert_eq!(sol.certificate_rank(), 2);
    }
}
