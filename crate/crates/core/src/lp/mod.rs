//! Cutting-plane solver over exponentially large constraint families.
//!
//! A family supplies its always-present rows and an exact separation
//! oracle. [`solve_to_extreme_point`] grows a working LP until the vertex
//! it returns satisfies the whole family; since the full region sits inside
//! every working relaxation, that vertex is a vertex of the full LP.

mod cover;
mod lattice;
mod pin;
mod spanning;

pub use cover::{separate_contra_polymatroid, CoverLp};
pub use lattice::{separate_lattice, LatticeLp};
pub use pin::{pin_optimum, PinReport};
pub use spanning::{
    biconnected_blocks, separate_spanning_tree, spanning_tree_membership_by_blocks, tighten_degree_bounds, McstLp,
    MAX_SEPARATION_VERTICES,
};

use serde::{Deserialize, Serialize};

use crate::bits::bits;
use crate::error::{Error, Result};
use crate::numeric::{simplex_solve, BasicSolution, Constraint, LinearProgram, LpError, Rational, Relation, VarBound};

/// Which family a working-LP row came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RowTag {
    /// `x(E(V)) = |V| - |F| - 1`.
    TreeTotal,
    /// `x(E(U)) <= |U| - |F(U)| - 1`.
    Subtour { set: u64 },
    /// `x(δ(S)) <= b(S)` for a laminar node.
    Degree { node: usize },
    /// `x(S ∩ E') >= r_k(S) - |F ∩ S|`.
    Cover { function: usize, set: u64 },
    /// `x(rho(S) ∩ E') >= r(S) - |F ∩ rho(S)|`.
    Rank { member: usize },
    /// Upper side of a crossing constraint.
    Upper { index: usize },
    /// Lower side of a crossing constraint.
    Lower { index: usize },
    /// Caller-supplied row.
    Extra,
}

/// A violated row, with exact sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub tag: RowTag,
    pub lhs: Rational,
    pub rhs: Rational,
    pub row: Constraint,
}

impl Violation {
    /// Recomputes the row at `x` and confirms it is violated as reported.
    pub fn reverify(&self, x: &[Rational]) -> bool {
        self.row.lhs(x) == self.lhs && self.row.rhs == self.rhs && !self.row.is_satisfied(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationResult {
    Feasible,
    Violated(Violation),
}

impl SeparationResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SeparationResult::Feasible)
    }
}

pub trait LpFamily {
    fn num_vars(&self) -> usize;
    fn costs(&self) -> Vec<Rational>;
    fn var_bounds(&self) -> Vec<VarBound> {
        vec![VarBound::unit(); self.num_vars()]
    }
    /// Rows present in every working LP.
    fn base_rows(&self) -> Vec<(RowTag, Constraint)>;
    /// Most violated row of the full family at `x`, or feasible.
    fn separate(&self, x: &[Rational]) -> Result<SeparationResult>;
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Replaces the family's cost vector.
    pub objective: Option<Vec<Rational>>,
    /// Added to the working LP from the start.
    pub extra_rows: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct ExtremePoint {
    pub solution: BasicSolution,
    /// Final working LP; its rows are all rows of the full family.
    pub lp: LinearProgram,
    pub tags: Vec<RowTag>,
    /// Objective after each cutting-plane round.
    pub objectives: Vec<Rational>,
    /// A separate pass after termination found the vertex feasible for the
    /// base rows and the whole family.
    pub separation_clean: bool,
    /// The tight-row rank certificate re-checked after termination.
    pub certified: bool,
}

impl ExtremePoint {
    pub fn values(&self) -> &[Rational] {
        &self.solution.values
    }

    pub fn objective(&self) -> &Rational {
        &self.solution.objective_value
    }

    pub fn rounds(&self) -> usize {
        self.objectives.len()
    }

    pub fn certificate_rank(&self) -> usize {
        self.solution.certificate_rank(&self.lp)
    }

    /// Tight working-LP constraint rows (not variable bounds) with their tags.
    pub fn tight_constraints(&self) -> Vec<(&RowTag, &Constraint)> {
        self.solution
            .tight_rows
            .iter()
            .filter_map(|r| match r {
                crate::numeric::TightRow::Constraint(i) => Some((&self.tags[*i], &self.lp.constraints[*i])),
                _ => None,
            })
            .collect()
    }
}

/// Tally of LP vertices produced by a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpStats {
    pub solves: usize,
    pub certified: usize,
    pub separation_clean: usize,
}

impl LpStats {
    pub fn record(&mut self, sol: &ExtremePoint) {
        self.solves += 1;
        self.certified += usize::from(sol.certified);
        self.separation_clean += usize::from(sol.separation_clean);
    }

    pub fn all_ok(&self) -> bool {
        self.certified == self.solves && self.separation_clean == self.solves
    }

    pub fn merge(&mut self, other: &LpStats) {
        self.solves += other.solves;
        self.certified += other.certified;
        self.separation_clean += other.separation_clean;
    }
}

const MAX_ROUNDS: usize = 100_000;

pub fn solve_to_extreme_point(family: &dyn LpFamily) -> Result<ExtremePoint> {
    solve_with(family, &SolveOptions::default())
}

pub fn solve_with(family: &dyn LpFamily, opts: &SolveOptions) -> Result<ExtremePoint> {
    let n = family.num_vars();
    let objective = opts.objective.clone().unwrap_or_else(|| family.costs());
    let mut lp = LinearProgram::new(objective, family.var_bounds());
    let mut tags = Vec::new();
    for (tag, row) in family.base_rows() {
        lp.push(row);
        tags.push(tag);
    }
    for row in &opts.extra_rows {
        lp.push(row.clone());
        tags.push(RowTag::Extra);
    }
    let mut objectives: Vec<Rational> = Vec::new();
    loop {
        let sol = simplex_solve(&lp).map_err(|e| match e {
            LpError::Infeasible => Error::Infeasible("LP relaxation is infeasible".into()),
            other => Error::from_lp(other, false, "cutting-plane solve"),
        })?;
        if sol.values.len() != n {
            return Err(Error::Invariant("simplex returned the wrong dimension".into()));
        }
        if let Some(prev) = objectives.last() {
            if sol.objective_value < *prev {
                return Err(Error::Invariant(format!(
                    "objective decreased from {prev} to {} after adding a cut",
                    sol.objective_value
                )));
            }
        }
        objectives.push(sol.objective_value.clone());
        match family.separate(&sol.values)? {
            SeparationResult::Feasible => {
                let separation_clean = lp.is_feasible(&sol.values) && family.separate(&sol.values)?.is_feasible();
                let certified = sol.verify(&lp).is_ok() && sol.certificate_rank(&lp) == n;
                return Ok(ExtremePoint {
                    solution: sol,
                    lp,
                    tags,
                    objectives,
                    separation_clean,
                    certified,
                });
            }
            SeparationResult::Violated(v) => {
                if !v.reverify(&sol.values) {
                    return Err(Error::Invariant(format!("separator reported a row that is not violated: {:?}", v.tag)));
                }
                if objectives.len() >= MAX_ROUNDS {
                    return Err(Error::Invariant("cutting-plane loop did not terminate".into()));
                }
                lp.push(v.row);
                tags.push(v.tag);
            }
        }
    }
}

/// Coefficient row over variables `vars` (bit positions, in order) with
/// ones on the elements of `mask`.
pub(crate) fn indicator_row(vars: &[usize], mask: u64) -> Vec<Rational> {
    vars.iter()
        .map(|&e| if mask >> e & 1 == 1 { Rational::one() } else { Rational::zero() })
        .collect()
}

/// Sum of `x` over the variables whose element lies in `mask`.
pub(crate) fn masked_sum(vars: &[usize], x: &[Rational], mask: u64) -> Rational {
    let mut s = Rational::zero();
    for (i, &e) in vars.iter().enumerate() {
        if mask >> e & 1 == 1 && !x[i].is_zero() {
            s += &x[i];
        }
    }
    s
}

/// Sum of `x` (indexed by the elements of `undecided`, ascending) over
/// the elements of `mask`.
pub fn masked_sum_over(undecided: u64, x: &[Rational], mask: u64) -> Rational {
    masked_sum(&mask_vars(undecided), x, mask)
}

pub(crate) fn mask_vars(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

pub(crate) fn row(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Constraint {
    Constraint::new(coeffs, relation, rhs)
}
