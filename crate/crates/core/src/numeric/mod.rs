//! Exact arithmetic: rationals, row-space rank and the simplex solver.

mod rank;
mod rational;
mod simplex;

pub use rank::{rank_of_rows, RowSpace, ShapeError};
pub use rational::{q, ParseRationalError, Rational};
pub use simplex::{
    dot, simplex_solve, unit_vector, BasicSolution, Constraint, LinearProgram, LpError, Relation,
    TightRow, VarBound,
};
