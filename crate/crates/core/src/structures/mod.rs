//! Graphs, laminar forests, matroid and lattice oracles, instances and
//! their JSON encoding.

pub mod graph;
pub mod instance;
pub mod io;
pub mod laminar;
pub mod lattice;
pub mod matroid;
pub mod setfn;

pub use graph::{Edge, Graph, UnionFind};
pub use instance::{
    max_frequency, ContraPolymatroidPair, CrossingConstraint, EdgeBound, GeneralMcstInstance,
    IntersectionInstance, LatticeInstance, LatticeVariant, McstInstance,
};
pub use io::AnyInstance;
pub use laminar::{LaminarForest, LaminarNode};
pub use lattice::{matroid_to_lattice, LatticeOracle, LatticeShape};
pub use matroid::MatroidOracle;
