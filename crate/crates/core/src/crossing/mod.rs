//! Iterative relaxation for crossing contra-polymatroid intersection and
//! crossing lattice polyhedra.

mod intersection;
mod lattice;
mod uncross;

pub use intersection::{
    check_chain_token_bound, intersection_lp_optimum, run_intersection, verify_intersection, ChainTokenReport,
    IntersectionEvent, IntersectionReport, IntersectionRun,
};
pub use lattice::{
    check_chain_growth, check_monotonicity_star, lattice_lp_optimum, run_lattice, verify_lattice, ChainGrowthReport, LatticeEvent,
    LatticeReport, LatticeRun,
};
pub use uncross::{uncross_chain, Chain, ChainDomain};
