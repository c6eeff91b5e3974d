use serde::{Deserialize, Serialize};

use crate::bits::{bit, bits, count, full};
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::structures::graph::Graph;
use crate::structures::laminar::LaminarForest;
use crate::structures::lattice::LatticeOracle;
use crate::structures::setfn::{check_table, supermodular_witness};

/// Laminar-family MCST input: a graph plus degree bounds on a laminar
/// family of vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McstInstance {
    pub graph: Graph,
    pub family: LaminarForest,
}

impl McstInstance {
    pub fn new(graph: Graph, sets: Vec<(u64, Rational)>) -> Result<Self> {
        let n = graph.n();
        if n == 0 {
            return Err(Error::Instance("graph has no vertices".into()));
        }
        if sets.len() > 2 * n - 1 {
            return Err(Error::Instance(format!(
                "{} degree sets exceed the limit 2n-1 = {}",
                sets.len(),
                2 * n - 1
            )));
        }
        for (i, (s, b)) in sets.iter().enumerate() {
            if s & !graph.all_vertices() != 0 {
                return Err(Error::Instance(format!("degree set {i} has vertices outside the graph")));
            }
            if !b.is_integer() || b.is_negative() {
                return Err(Error::Instance(format!("degree bound {i} is {b}, expected a non-negative integer")));
            }
        }
        let family = LaminarForest::from_sets(sets)?;
        Ok(McstInstance { graph, family })
    }

    /// Original sets and bounds in input order.
    pub fn sets(&self) -> Vec<(u64, Rational)> {
        (0..self.family.capacity())
            .map(|i| (self.family.vertices(i), self.family.bound(i).clone()))
            .collect()
    }
}

/// An edge-set degree bound `|T ∩ edges| <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBound {
    pub label: String,
    pub edges: Vec<usize>,
    pub bound: Rational,
}

/// Spanning tree with arbitrary (non-laminar) edge-set bounds. Only the
/// brute-force verifiers consume this.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralMcstInstance {
    pub graph: Graph,
    pub bounds: Vec<EdgeBound>,
}

impl GeneralMcstInstance {
    pub fn new(graph: Graph, bounds: Vec<EdgeBound>) -> Result<Self> {
        for b in &bounds {
            if let Some(&e) = b.edges.iter().find(|&&e| e >= graph.m()) {
                return Err(Error::Instance(format!("bound {} names missing edge {e}", b.label)));
            }
        }
        Ok(GeneralMcstInstance { graph, bounds })
    }

    /// Largest additive excess `|tree ∩ E_i| - b_i` over all bounds (0 if none exceed).
    pub fn max_violation(&self, tree: &[usize]) -> Rational {
        let mut in_tree = vec![false; self.graph.m()];
        for &e in tree {
            in_tree[e] = true;
        }
        self.bounds
            .iter()
            .map(|b| {
                let load = b.edges.iter().filter(|&&e| in_tree[e]).count() as i64;
                Rational::from(load) - &b.bound
            })
            .fold(Rational::zero(), |acc, v| acc.max(v))
    }
}

/// A side constraint `lower <= x(E_i) <= upper`; either side may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingConstraint {
    pub elements: u64,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl CrossingConstraint {
    pub fn upper(elements: u64, b: Rational) -> Self {
        CrossingConstraint {
            elements,
            lower: None,
            upper: Some(b),
        }
    }

    fn validate(&self, i: usize, ground: usize) -> Result<()> {
        if self.elements & !full(ground) != 0 {
            return Err(Error::Instance(format!("constraint {i} leaves the ground set")));
        }
        if let (Some(a), Some(b)) = (&self.lower, &self.upper) {
            if a > b {
                return Err(Error::Instance(format!("constraint {i} has lower {a} above upper {b}")));
            }
        }
        Ok(())
    }
}

/// Largest number of constraint sets containing one element.
pub fn max_frequency(constraints: &[CrossingConstraint], ground: usize) -> usize {
    (0..ground)
        .map(|e| constraints.iter().filter(|c| c.elements & bit(e) != 0).count())
        .max()
        .unwrap_or(0)
}

/// Two supermodular functions on `2^E`, given as tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContraPolymatroidPair {
    n: usize,
    r1: Vec<i64>,
    r2: Vec<i64>,
}

impl ContraPolymatroidPair {
    pub fn new(n: usize, r1: Vec<i64>, r2: Vec<i64>) -> Result<Self> {
        for (name, r) in [("r1", &r1), ("r2", &r2)] {
            check_table(n, r, name).map_err(|m| {
                if n > crate::structures::setfn::MAX_GROUND {
                    Error::Guard(m)
                } else {
                    Error::Instance(m)
                }
            })?;
            if r[0] != 0 {
                return Err(Error::Instance(format!("{name} of the empty set is {}", r[0])));
            }
            if let Some(s) = r.iter().position(|&v| v < 0) {
                return Err(Error::Instance(format!("{name}({s:#b}) is negative")));
            }
            if let Some((a, b)) = supermodular_witness(n, r) {
                return Err(Error::Instance(format!(
                    "{name} is not supermodular on the pair {a:#b}, {b:#b}"
                )));
            }
        }
        Ok(ContraPolymatroidPair { n, r1, r2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r1(&self, s: u64) -> i64 {
        self.r1[s as usize]
    }

    pub fn r2(&self, s: u64) -> i64 {
        self.r2[s as usize]
    }

    /// `r1` for `k == 0`, `r2` for `k == 1`.
    pub fn r(&self, k: usize, s: u64) -> i64 {
        if k == 0 {
            self.r1(s)
        } else {
            self.r2(s)
        }
    }

    pub fn tables(&self) -> (&[i64], &[i64]) {
        (&self.r1, &self.r2)
    }

    /// `|set ∩ S| >= max(r1(S), r2(S))` for every `S`.
    pub fn covers(&self, set: u64) -> bool {
        (0..=full(self.n)).all(|s| {
            let have = count(set & s) as i64;
            have >= self.r1(s) && have >= self.r2(s)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionInstance {
    pub pair: ContraPolymatroidPair,
    pub costs: Vec<Rational>,
    pub constraints: Vec<CrossingConstraint>,
}

impl IntersectionInstance {
    pub fn new(pair: ContraPolymatroidPair, costs: Vec<Rational>, constraints: Vec<CrossingConstraint>) -> Result<Self> {
        let n = pair.n();
        if costs.len() != n {
            return Err(Error::Instance(format!("{} costs for {n} elements", costs.len())));
        }
        for (i, c) in constraints.iter().enumerate() {
            c.validate(i, n)?;
            if c.lower.is_some() || c.upper.is_none() {
                return Err(Error::Instance(format!("constraint {i} must carry an upper bound only")));
            }
        }
        Ok(IntersectionInstance {
            pair,
            costs,
            constraints,
        })
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn delta(&self) -> usize {
        max_frequency(&self.constraints, self.n())
    }

    pub fn upper(&self, i: usize) -> &Rational {
        self.constraints[i].upper.as_ref().expect("validated upper bound")
    }

    pub fn cost_of(&self, set: u64) -> Rational {
        bits(set).map(|e| &self.costs[e]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeVariant {
    General,
    Inclusion,
}

impl std::str::FromStr for LatticeVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "general" => Ok(LatticeVariant::General),
            "inclusion" => Ok(LatticeVariant::Inclusion),
            other => Err(format!("unknown variant {other:?}, expected general or inclusion")),
        }
    }
}

impl std::fmt::Display for LatticeVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LatticeVariant::General => "general",
            LatticeVariant::Inclusion => "inclusion",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeInstance {
    pub lattice: LatticeOracle,
    pub costs: Vec<Rational>,
    pub constraints: Vec<CrossingConstraint>,
    pub variant: LatticeVariant,
}

impl LatticeInstance {
    pub fn new(
        lattice: LatticeOracle,
        costs: Vec<Rational>,
        constraints: Vec<CrossingConstraint>,
        variant: LatticeVariant,
    ) -> Result<Self> {
        let n = lattice.ground();
        if costs.len() != n {
            return Err(Error::Instance(format!("{} costs for {n} elements", costs.len())));
        }
        for (i, c) in constraints.iter().enumerate() {
            c.validate(i, n)?;
        }
        let inst = LatticeInstance {
            lattice,
            costs,
            constraints,
            variant,
        };
        inst.check_variant()?;
        Ok(inst)
    }

    /// The inclusion variant needs an inclusion-ordered lattice and upper
    /// bounds only.
    pub fn check_variant(&self) -> Result<()> {
        if self.variant == LatticeVariant::Inclusion {
            if !self.lattice.is_inclusion_ordered() {
                return Err(Error::Instance("inclusion variant requires the order to be inclusion of rho images".into()));
            }
            if self.constraints.iter().any(|c| c.lower.is_some() || c.upper.is_none()) {
                return Err(Error::Instance("inclusion variant allows upper bounds only".into()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.lattice.ground()
    }

    pub fn delta(&self) -> usize {
        max_frequency(&self.constraints, self.n())
    }

    pub fn cost_of(&self, set: u64) -> Rational {
        bits(set).map(|e| &self.costs[e]).sum()
    }

    /// Every rank constraint `|set ∩ rho(S)| >= r(S)` holds.
    pub fn covers(&self, set: u64) -> bool {
        (0..self.lattice.len()).all(|a| count(set & self.lattice.rho(a)) as i64 >= self.lattice.rank(a))
    }

    /// Every side constraint holds exactly.
    pub fn meets_bounds(&self, set: u64) -> bool {
        self.constraints.iter().all(|c| {
            let load = Rational::from(count(set & c.elements));
            c.lower.as_ref().is_none_or(|a| &load >= a) && c.upper.as_ref().is_none_or(|b| &load <= b)
        })
    }
}
