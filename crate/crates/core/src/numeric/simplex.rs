//! Bounded-variable primal simplex over exact rationals.
//!
//! Dense tableau, two phases, Bland's rule for both the entering and the
//! leaving variable. Variable bounds are handled natively: a nonbasic
//! variable sits at its lower or upper bound and may flip between them
//! without a pivot.

use serde::{Deserialize, Serialize};

use super::rank::RowSpace;
use super::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Finite lower bound, optional upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarBound {
    pub lower: Rational,
    pub upper: Option<Rational>,
}

impl VarBound {
    pub fn unit() -> Self {
        VarBound {
            lower: Rational::zero(),
            upper: Some(Rational::one()),
        }
    }

    pub fn non_negative() -> Self {
        VarBound {
            lower: Rational::zero(),
            upper: None,
        }
    }
}

/// `minimize objective · x` subject to `constraints` and `bounds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>, bounds: Vec<VarBound>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let Some(u) = &b.upper {
                if *u < b.lower {
                    return Err(LpError::Malformed(format!(
                        "variable {j} has lower bound {} above upper bound {u}",
                        b.lower
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.bounds.iter().zip(x).all(|(b, v)| {
                *v >= b.lower && b.upper.as_ref().is_none_or(|u| v <= u)
            })
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// All rows (constraints and variable bounds) satisfied with equality by `x`.
    pub fn tight_rows(&self, x: &[Rational]) -> Vec<TightRow> {
        let mut out: Vec<TightRow> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.lhs(x) == c.rhs)
            .map(|(i, _)| TightRow::Constraint(i))
            .collect();
        for (j, (b, v)) in self.bounds.iter().zip(x).enumerate() {
            if *v == b.lower {
                out.push(TightRow::Lower(j));
            }
            if b.upper.as_ref() == Some(v) {
                out.push(TightRow::Upper(j));
            }
        }
        out
    }

    /// Coefficient vector of a tight-row reference.
    pub fn row_vector(&self, row: TightRow) -> Vec<Rational> {
        match row {
            TightRow::Constraint(i) => self.constraints[i].coeffs.clone(),
            TightRow::Lower(j) | TightRow::Upper(j) => unit_vector(self.num_vars(), j),
        }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn unit_vector(n: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[j] = Rational::one();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TightRow {
    Constraint(usize),
    Lower(usize),
    Upper(usize),
}

/// An optimal vertex together with the tight rows certifying it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicSolution {
    pub values: Vec<Rational>,
    pub objective_value: Rational,
    pub tight_rows: Vec<TightRow>,
}

impl BasicSolution {
    /// Rank of the tight rows. Equals the number of variables at a vertex.
    pub fn certificate_rank(&self, lp: &LinearProgram) -> usize {
        let mut space = RowSpace::new(lp.num_vars());
        for &row in &self.tight_rows {
            space.insert(&lp.row_vector(row));
            if space.is_full() {
                break;
            }
        }
        space.rank()
    }

    /// Independent check that `self` is a feasible vertex of `lp` with a
    /// valid tight-row certificate.
    pub fn verify(&self, lp: &LinearProgram) -> Result<(), String> {
        if !lp.is_feasible(&self.values) {
            return Err("solution violates the LP".into());
        }
        if lp.objective_value(&self.values) != self.objective_value {
            return Err("objective value mismatch".into());
        }
        for &row in &self.tight_rows {
            let tight = match row {
                TightRow::Constraint(i) => lp.constraints[i].lhs(&self.values) == lp.constraints[i].rhs,
                TightRow::Lower(j) => self.values[j] == lp.bounds[j].lower,
                TightRow::Upper(j) => lp.bounds[j].upper.as_ref() == Some(&self.values[j]),
            };
            if !tight {
                return Err(format!("row {row:?} listed as tight but is slack"));
            }
        }
        let rank = self.certificate_rank(lp);
        if rank != lp.num_vars() {
            return Err(format!(
                "tight rows have rank {rank}, need {} for a vertex",
                lp.num_vars()
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("vertex certificate failed: {0}")]
    Certificate(String),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    value: Vec<Rational>,
    lower: Vec<Rational>,
    upper: Vec<Option<Rational>>,
    reduced: Vec<Rational>,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.value.len()
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut d = costs.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    d[j] -= cb * a;
                }
            }
        }
        self.reduced = d;
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.upper[j].as_ref() == Some(&self.lower[j])
    }

    fn at_upper(&self, j: usize) -> bool {
        self.upper[j].as_ref() == Some(&self.value[j])
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let inv = self.rows[r][q].recip();
        if !inv.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
        }
        let support: Vec<usize> = (0..self.ncols())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.reduced[q].is_zero() {
            let f = self.reduced[q].clone();
            for &j in &support {
                self.reduced[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.is_basic[self.basis[r]] = false;
        self.basis[r] = q;
        self.is_basic[q] = true;
    }

    /// One iteration of Bland's rule.
    fn step(&mut self) -> Step {
        let entering = (0..self.ncols()).find(|&j| {
            if self.is_basic[j] || self.is_fixed(j) {
                return false;
            }
            let d = &self.reduced[j];
            if self.at_upper(j) {
                d.is_positive()
            } else {
                d.is_negative()
            }
        });
        let Some(q) = entering else {
            return Step::Optimal;
        };
        let increasing = !self.at_upper(q);

        // (theta, leaving variable, row or None for a bound flip, leaves at upper)
        let mut best: Option<(Rational, usize, Option<usize>, bool)> = None;
        let mut consider = |theta: Rational, var: usize, row: Option<usize>, to_upper: bool| {
            let better = match &best {
                None => true,
                Some((t, v, _, _)) => theta < *t || (theta == *t && var < *v),
            };
            if better {
                best = Some((theta, var, row, to_upper));
            }
        };
        if let Some(u) = &self.upper[q] {
            consider(u - &self.lower[q], q, None, increasing);
        }
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[q];
            if a.is_zero() {
                continue;
            }
            // Rate at which the basic variable decreases per unit of theta.
            let rate = if increasing { a.clone() } else { -a };
            let k = self.basis[i];
            if rate.is_positive() {
                consider((&self.value[k] - &self.lower[k]) / &rate, k, Some(i), false);
            } else if let Some(u) = &self.upper[k] {
                consider((u - &self.value[k]) / (-&rate), k, Some(i), true);
            }
        }
        let Some((theta, leaving, row, to_upper)) = best else {
            return Step::Unbounded;
        };

        if !theta.is_zero() {
            let signed = if increasing { theta.clone() } else { -&theta };
            self.value[q] += &signed;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_zero() {
                    let k = self.basis[i];
                    let delta = a * &signed;
                    self.value[k] -= delta;
                }
            }
        }
        if let Some(r) = row {
            self.pivot(r, q);
            // Snap exactly onto the bound that was hit.
            self.value[leaving] = if to_upper {
                self.upper[leaving].clone().expect("finite upper bound")
            } else {
                self.lower[leaving].clone()
            };
        } else {
            self.value[q] = if to_upper {
                self.upper[q].clone().expect("finite upper bound")
            } else {
                self.lower[q].clone()
            };
        }
        Step::Moved
    }

    fn optimize(&mut self) -> Result<(), LpError> {
        loop {
            match self.step() {
                Step::Optimal => return Ok(()),
                Step::Unbounded => return Err(LpError::Unbounded),
                Step::Moved => {}
            }
        }
    }
}

/// Solves `lp` to an optimal vertex.
///
/// Deterministic: the same input always produces the same vertex. The
/// returned certificate is recomputed from the original rows by exact
/// equality and rank-checked; a failed check is reported as
/// [`LpError::Certificate`].
pub fn simplex_solve(lp: &LinearProgram) -> Result<BasicSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.constraints.len();

    if m == 0 {
        // Every variable goes to the bound favoured by its cost.
        let mut values = Vec::with_capacity(n);
        for (c, b) in lp.objective.iter().zip(&lp.bounds) {
            if c.is_negative() {
                match &b.upper {
                    Some(u) => values.push(u.clone()),
                    None => return Err(LpError::Unbounded),
                }
            } else {
                values.push(b.lower.clone());
            }
        }
        return finish(lp, values);
    }

    let n_slack = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let mut lower: Vec<Rational> = lp.bounds.iter().map(|b| b.lower.clone()).collect();
    let mut upper: Vec<Option<Rational>> = lp.bounds.iter().map(|b| b.upper.clone()).collect();
    lower.extend(std::iter::repeat_n(Rational::zero(), n_slack));
    upper.extend(std::iter::repeat_n(None, n_slack));

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_rows: Vec<(usize, Rational)> = Vec::new();
    let mut slack_col = n;
    let mut row_basic_value = Vec::with_capacity(m);

    for c in &lp.constraints {
        let mut row = c.coeffs.clone();
        row.resize(n + n_slack, Rational::zero());
        let residual = &c.rhs - dot(&c.coeffs, &lower[..n]);
        match c.relation {
            Relation::Le | Relation::Ge => {
                let sign = if c.relation == Relation::Le {
                    Rational::one()
                } else {
                    -Rational::one()
                };
                row[slack_col] = sign.clone();
                // The slack can start basic if it lands at a non-negative value.
                let slack_value = &residual * &sign;
                if !slack_value.is_negative() {
                    if sign.is_negative() {
                        for a in row.iter_mut() {
                            *a = -&*a;
                        }
                    }
                    basis.push(slack_col);
                    row_basic_value.push(slack_value);
                } else {
                    art_rows.push((rows.len(), residual));
                    basis.push(usize::MAX);
                    row_basic_value.push(Rational::zero());
                }
                slack_col += 1;
            }
            Relation::Eq => {
                art_rows.push((rows.len(), residual));
                basis.push(usize::MAX);
                row_basic_value.push(Rational::zero());
            }
        }
        rows.push(row);
    }

    let n_art = art_rows.len();
    let ncols = n + n_slack + n_art;
    for row in rows.iter_mut() {
        row.resize(ncols, Rational::zero());
    }
    lower.extend(std::iter::repeat_n(Rational::zero(), n_art));
    upper.extend(std::iter::repeat_n(None, n_art));
    for (k, (r, residual)) in art_rows.iter().enumerate() {
        let col = n + n_slack + k;
        // Artificial coefficient matches the residual's sign so it starts >= 0;
        // the row is then scaled so the artificial column is +1.
        if residual.is_negative() {
            for a in rows[*r].iter_mut() {
                *a = -&*a;
            }
        }
        rows[*r][col] = Rational::one();
        basis[*r] = col;
        row_basic_value[*r] = residual.abs();
    }

    let mut value = lower.clone();
    let mut is_basic = vec![false; ncols];
    for (r, &b) in basis.iter().enumerate() {
        value[b] = row_basic_value[r].clone();
        is_basic[b] = true;
    }

    let mut tab = Tableau {
        rows,
        basis,
        is_basic,
        value,
        lower,
        upper,
        reduced: Vec::new(),
    };

    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); ncols];
        for c in phase1.iter_mut().skip(n + n_slack) {
            *c = Rational::one();
        }
        tab.set_costs(&phase1);
        tab.optimize().map_err(|_| {
            LpError::Certificate("phase one reported unbounded".into())
        })?;
        let infeasibility: Rational = tab.value[n + n_slack..].iter().sum();
        if infeasibility.is_positive() {
            return Err(LpError::Infeasible);
        }
        for j in n + n_slack..ncols {
            tab.upper[j] = Some(Rational::zero());
        }
    }

    let mut costs = lp.objective.clone();
    costs.resize(ncols, Rational::zero());
    tab.set_costs(&costs);
    tab.optimize()?;

    let values = tab.value[..n].to_vec();
    finish(lp, values)
}

fn finish(lp: &LinearProgram, values: Vec<Rational>) -> Result<BasicSolution, LpError> {
    let objective_value = lp.objective_value(&values);
    let tight_rows = lp.tight_rows(&values);
    let sol = BasicSolution {
        values,
        objective_value,
        tight_rows,
    };
    sol.verify(lp).map_err(LpError::Certificate)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn row(c: &[i64], rel: Relation, rhs: i64) -> Constraint {
        Constraint::new(c.iter().map(|&x| r(x)).collect(), rel, r(rhs))
    }

    #[test]
    fn equality_forces_objective() {
        let mut lp = LinearProgram::new(vec![r(1), r(1)], vec![VarBound::unit(); 2]);
        lp.push(row(&[1, 1], Relation::Eq, 2));
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.values, vec![r(1), r(1)]);
        assert_eq!(sol.objective_value, r(2));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(vec![r(0)], vec![VarBound::non_negative()]);
        lp.push(row(&[1], Relation::Ge, 3));
        lp.push(row(&[1], Relation::Le, 1));
        assert_eq!(simplex_solve(&lp), Err(LpError::Infeasible));
    }

    #[test]
    fn triangle_spanning_tree_lp() {
        // x(E) = 2, x(E(U)) <= 1 for each pair; unit costs.
        let mut lp = LinearProgram::new(vec![r(1); 3], vec![VarBound::non_negative(); 3]);
        lp.push(row(&[1, 1, 1], Relation::Eq, 2));
        for j in 0..3 {
            let mut c = [0; 3];
            c[j] = 1;
            lp.push(row(&c, Relation::Le, 1));
        }
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.objective_value, r(2));
        assert!(sol.values.iter().all(|v| v.is_zero() || v.is_one()));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(vec![r(-1), r(0)], vec![VarBound::non_negative(); 2]);
        lp.push(row(&[1, -1], Relation::Le, 1));
        assert_eq!(simplex_solve(&lp), Err(LpError::Unbounded));
    }

    #[test]
    fn malformed_rejected() {
        let mut lp = LinearProgram::new(vec![r(1)], vec![VarBound::unit()]);
        lp.push(row(&[1, 1], Relation::Le, 1));
        assert!(matches!(simplex_solve(&lp), Err(LpError::Malformed(_))));
        let bad = LinearProgram::new(
            vec![r(1)],
            vec![VarBound {
                lower: r(2),
                upper: Some(r(1)),
            }],
        );
        assert!(matches!(simplex_solve(&bad), Err(LpError::Malformed(_))));
    }

    #[test]
    fn fractional_vertex_with_nonzero_lower_bounds() {
        // max x + y  s.t. 2x + y <= 4, x + 2y <= 4, x,y >= 1/2
        let mut lp = LinearProgram::new(
            vec![r(-1), r(-1)],
            vec![
                VarBound {
                    lower: q(1, 2),
                    upper: None
                };
                2
            ],
        );
        lp.push(row(&[2, 1], Relation::Le, 4));
        lp.push(row(&[1, 2], Relation::Le, 4));
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.values, vec![q(4, 3), q(4, 3)]);
        assert_eq!(sol.objective_value, q(-8, 3));
    }

    #[test]
    fn degenerate_klee_minty_style_terminates() {
        // Beale's cycling example (cycles under Dantzig's rule without anti-cycling).
        let mut lp = LinearProgram::new(
            vec![q(-3, 4), r(150), q(-1, 50), r(6)],
            vec![VarBound::non_negative(); 4],
        );
        lp.push(Constraint::new(vec![q(1, 4), r(-60), q(-1, 25), r(9)], Relation::Le, r(0)));
        lp.push(Constraint::new(vec![q(1, 2), r(-90), q(-1, 50), r(3)], Relation::Le, r(0)));
        lp.push(Constraint::new(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1)));
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.objective_value, q(-1, 20));
    }

    #[test]
    fn no_constraints() {
        let lp = LinearProgram::new(vec![r(-1), r(2)], vec![VarBound::unit(); 2]);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.values, vec![r(1), r(0)]);
    }
}
