//! Uniqueness of an LP optimum by per-coordinate re-optimisation.

use serde::{Deserialize, Serialize};

use super::{solve_to_extreme_point, solve_with, LpFamily, LpStats, SolveOptions};
use crate::error::Result;
use crate::numeric::{unit_vector, Constraint, Rational, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinReport {
    pub optimum: Rational,
    pub point: Vec<Rational>,
    /// `(min x_j, max x_j)` over the optimal face.
    pub ranges: Vec<(Rational, Rational)>,
    pub lp_stats: LpStats,
}

impl PinReport {
    /// The optimal face is the single point `point`.
    pub fn pinned(&self) -> bool {
        self.ranges.iter().zip(&self.point).all(|((lo, hi), x)| lo == x && hi == x)
    }

    pub fn auxiliary_solves(&self) -> usize {
        2 * self.ranges.len()
    }
}

/// Solves the family, then minimises and maximises every coordinate over
/// the face `c·x = OPT`.
pub fn pin_optimum(family: &dyn LpFamily) -> Result<PinReport> {
    let first = solve_to_extreme_point(family)?;
    let mut lp_stats = LpStats::default();
    lp_stats.record(&first);
    let n = family.num_vars();
    let face = Constraint::new(family.costs(), Relation::Eq, first.objective().clone());
    let mut ranges = Vec::with_capacity(n);
    for j in 0..n {
        let mut ends = Vec::with_capacity(2);
        for sign in [1i64, -1] {
            let objective = unit_vector(n, j).into_iter().map(|v| v * Rational::from(sign)).collect();
            let sol = solve_with(
                family,
                &SolveOptions {
                    objective: Some(objective),
                    extra_rows: vec![face.clone()],
                },
            )?;
            lp_stats.record(&sol);
            ends.push(sol.values()[j].clone());
        }
        let hi = ends.pop().expect("two solves");
        let lo = ends.pop().expect("two solves");
        ranges.push((lo, hi));
    }
    Ok(PinReport {
        optimum: first.objective().clone(),
        point: first.values().to_vec(),
        ranges,
        lp_stats,
    })
}
