//! Lattice-polyhedron relaxation with two-sided side constraints.

use std::cmp::Ordering;

use super::{indicator_row, mask_vars, masked_sum, row, LpFamily, RowTag, SeparationResult, Violation};
use crate::bits::{bits, count};
use crate::error::Result;
use crate::numeric::{Constraint, Rational, Relation};
use crate::structures::{LatticeInstance, LatticeOracle};

/// Most violated row `x(rho(S) ∩ E') >= r(S) - |F ∩ rho(S)|` over all
/// members. Ties go to the smaller member index.
pub fn separate_lattice(lattice: &LatticeOracle, undecided: u64, fixed: u64, x: &[Rational]) -> SeparationResult {
    let vars = mask_vars(undecided);
    assert_eq!(vars.len(), x.len());
    let mut best: Option<(Rational, usize)> = None;
    for a in 0..lattice.len() {
        let rho = lattice.rho(a);
        let rhs = lattice.rank(a) - count(fixed & rho) as i64;
        if rhs <= 0 {
            continue;
        }
        let rhs = Rational::from(rhs);
        let lhs = masked_sum(&vars, x, rho);
        if lhs >= rhs {
            continue;
        }
        let viol = &rhs - &lhs;
        if best.as_ref().is_none_or(|(bv, _)| viol.cmp(bv) == Ordering::Greater) {
            best = Some((viol, a));
        }
    }
    let Some((_, a)) = best else {
        return SeparationResult::Feasible;
    };
    let rho = lattice.rho(a);
    let rhs = Rational::from(lattice.rank(a) - count(fixed & rho) as i64);
    let c = row(indicator_row(&vars, rho), Relation::Ge, rhs.clone());
    SeparationResult::Violated(Violation {
        tag: RowTag::Rank { member: a },
        lhs: c.lhs(x),
        rhs,
        row: c,
    })
}

/// Working LP of one lattice iteration.
#[derive(Debug, Clone)]
pub struct LatticeLp<'a> {
    pub inst: &'a LatticeInstance,
    pub undecided: u64,
    pub fixed: u64,
    /// Constraint indices still in W.
    pub active: Vec<usize>,
}

impl LpFamily for LatticeLp<'_> {
    fn num_vars(&self) -> usize {
        count(self.undecided)
    }

    fn costs(&self) -> Vec<Rational> {
        bits(self.undecided).map(|e| self.inst.costs[e].clone()).collect()
    }

    fn base_rows(&self) -> Vec<(RowTag, Constraint)> {
        let vars = mask_vars(self.undecided);
        let mut rows = Vec::new();
        for &i in &self.active {
            let c = &self.inst.constraints[i];
            let used = Rational::from(count(self.fixed & c.elements));
            let coeffs = indicator_row(&vars, c.elements);
            if let Some(a) = &c.lower {
                rows.push((RowTag::Lower { index: i }, row(coeffs.clone(), Relation::Ge, a - &used)));
            }
            if let Some(b) = &c.upper {
                rows.push((RowTag::Upper { index: i }, row(coeffs, Relation::Le, b - &used)));
            }
        }
        rows
    }

    fn separate(&self, x: &[Rational]) -> Result<SeparationResult> {
        Ok(separate_lattice(&self.inst.lattice, self.undecided, self.fixed, x))
    }
}
