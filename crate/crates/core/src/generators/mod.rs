//! Instance generators: seeded random corpora and the gap constructions.

pub mod gap;
pub mod random;
pub mod reduction;
pub mod tight;

pub use gap::{gen_mcst_gap, gen_planar_mincut_gap, GapReport, McstGap, PlanarGap};
pub use random::{random_intersection, random_lattice, random_mcst, random_mcst_with, rng_for};
pub use reduction::{check_reduction, reduce_uniform_crossing_to_mcst, ReductionReport, UniformCrossing};
pub use tight::{gen_edge_cover_tight, initial_cover_lp};
