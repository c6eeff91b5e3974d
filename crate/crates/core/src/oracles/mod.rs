//! Exhaustive ground-truth solvers.

mod brute;
mod trees;

pub use brute::{brute_mcst, brute_subset_opt, greedy_mst, BruteMcst, EdgeBoundSet, MAX_BRUTE_GROUND};
pub use trees::{enumerate_spanning_trees, for_each_spanning_tree, kirchhoff_count, EdgeOrder, MAX_TREES};
