//! JSON instance files.
//!
//! Every file carries `"schema": 1` and a `"type"` tag. Rationals are
//! `"p/q"` strings, sets are sorted index lists. The encoder writes keys in
//! sorted order so files are diff-stable.

use serde::{Deserialize, Serialize};

use crate::bits::{from_indices, to_indices};
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::structures::graph::Graph;
use crate::structures::instance::{
    ContraPolymatroidPair, CrossingConstraint, EdgeBound, GeneralMcstInstance, IntersectionInstance,
    LatticeInstance, LatticeVariant, McstInstance,
};
use crate::structures::lattice::{matroid_to_lattice, LatticeOracle, LatticeShape};
use crate::structures::matroid::MatroidOracle;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyInstance {
    Mcst(McstInstance),
    GeneralMcst(GeneralMcstInstance),
    Intersection(IntersectionInstance),
    Lattice(LatticeInstance),
}

impl AnyInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyInstance::Mcst(_) => "mcst",
            AnyInstance::GeneralMcst(_) => "general_mcst",
            AnyInstance::Intersection(_) => "intersection",
            AnyInstance::Lattice(_) => "lattice",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<usize>,
    u: usize,
    v: usize,
    #[serde(default = "Rational::zero")]
    cost: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    vertices: Vec<usize>,
    bound: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdgeBound {
    #[serde(default)]
    label: String,
    edges: Vec<usize>,
    bound: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    elements: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    rho: Vec<usize>,
    rank: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawLattice {
    Powerset { rank: Vec<i64> },
    Matroid { rank: Vec<i64> },
    Explicit {
        members: Vec<RawMember>,
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawInstance {
    Mcst {
        schema: u32,
        n: usize,
        edges: Vec<RawEdge>,
        family: Vec<RawSet>,
    },
    GeneralMcst {
        schema: u32,
        n: usize,
        edges: Vec<RawEdge>,
        bounds: Vec<RawEdgeBound>,
    },
    Intersection {
        schema: u32,
        elements: usize,
        costs: Vec<Rational>,
        r1: Vec<i64>,
        r2: Vec<i64>,
        constraints: Vec<RawConstraint>,
    },
    Lattice {
        schema: u32,
        elements: usize,
        costs: Vec<Rational>,
        variant: LatticeVariant,
        lattice: RawLattice,
        constraints: Vec<RawConstraint>,
    },
}

fn check_indices(list: &[usize], limit: usize, what: &str) -> Result<u64> {
    if let Some(&i) = list.iter().find(|&&i| i >= limit.min(64)) {
        return Err(Error::Instance(format!("{what} index {i} out of range 0..{limit}")));
    }
    Ok(from_indices(list.iter().copied()))
}

fn graph_from_raw(n: usize, edges: &[RawEdge]) -> Result<Graph> {
    let mut g = Graph::new(n)?;
    for (pos, e) in edges.iter().enumerate() {
        if let Some(id) = e.id {
            if id != pos {
                return Err(Error::Instance(format!("edge at position {pos} has id {id}; ids must be 0..m in order")));
            }
        }
        g.add_edge(e.u, e.v, e.cost.clone())?;
    }
    Ok(g)
}

fn graph_to_raw(g: &Graph) -> Vec<RawEdge> {
    g.edges()
        .iter()
        .map(|e| RawEdge {
            id: Some(e.id),
            u: e.u,
            v: e.v,
            cost: e.cost.clone(),
        })
        .collect()
}

fn constraints_from_raw(raw: Vec<RawConstraint>, n: usize) -> Result<Vec<CrossingConstraint>> {
    raw.into_iter()
        .map(|c| {
            Ok(CrossingConstraint {
                elements: check_indices(&c.elements, n, "constraint element")?,
                lower: c.lower,
                upper: c.upper,
            })
        })
        .collect()
}

fn constraints_to_raw(cs: &[CrossingConstraint]) -> Vec<RawConstraint> {
    cs.iter()
        .map(|c| RawConstraint {
            elements: to_indices(c.elements),
            lower: c.lower.clone(),
            upper: c.upper.clone(),
        })
        .collect()
}

fn from_raw(raw: RawInstance) -> Result<AnyInstance> {
    let schema = match &raw {
        RawInstance::Mcst { schema, .. }
        | RawInstance::GeneralMcst { schema, .. }
        | RawInstance::Intersection { schema, .. }
        | RawInstance::Lattice { schema, .. } => *schema,
    };
    if schema != SCHEMA {
        return Err(Error::Instance(format!("unsupported schema {schema}, expected {SCHEMA}")));
    }
    Ok(match raw {
        RawInstance::Mcst { n, edges, family, .. } => {
            let g = graph_from_raw(n, &edges)?;
            let sets = family
                .into_iter()
                .map(|s| Ok((check_indices(&s.vertices, n, "vertex")?, s.bound)))
                .collect::<Result<Vec<_>>>()?;
            AnyInstance::Mcst(McstInstance::new(g, sets)?)
        }
        RawInstance::GeneralMcst { n, edges, bounds, .. } => {
            let g = graph_from_raw(n, &edges)?;
            let bounds = bounds
                .into_iter()
                .map(|b| EdgeBound {
                    label: b.label,
                    edges: b.edges,
                    bound: b.bound,
                })
                .collect();
            AnyInstance::GeneralMcst(GeneralMcstInstance::new(g, bounds)?)
        }
        RawInstance::Intersection {
            elements,
            costs,
            r1,
            r2,
            constraints,
            ..
        } => {
            let pair = ContraPolymatroidPair::new(elements, r1, r2)?;
            let cs = constraints_from_raw(constraints, elements)?;
            AnyInstance::Intersection(IntersectionInstance::new(pair, costs, cs)?)
        }
        RawInstance::Lattice {
            elements,
            costs,
            variant,
            lattice,
            constraints,
            ..
        } => {
            let lat = match lattice {
                RawLattice::Powerset { rank } => LatticeOracle::powerset(elements, rank)?,
                RawLattice::Matroid { rank } => matroid_to_lattice(&MatroidOracle::from_table(elements, rank)?)?,
                RawLattice::Explicit { members, meet, join } => {
                    let rho = members
                        .iter()
                        .map(|m| check_indices(&m.rho, elements, "rho element"))
                        .collect::<Result<Vec<_>>>()?;
                    let rank = members.iter().map(|m| m.rank).collect();
                    LatticeOracle::explicit(elements, rho, rank, meet, join)?
                }
            };
            let cs = constraints_from_raw(constraints, elements)?;
            AnyInstance::Lattice(LatticeInstance::new(lat, costs, cs, variant)?)
        }
    })
}

fn to_raw(inst: &AnyInstance) -> RawInstance {
    match inst {
        AnyInstance::Mcst(m) => RawInstance::Mcst {
            schema: SCHEMA,
            n: m.graph.n(),
            edges: graph_to_raw(&m.graph),
            family: m
                .sets()
                .into_iter()
                .map(|(s, b)| RawSet {
                    vertices: to_indices(s),
                    bound: b,
                })
                .collect(),
        },
        AnyInstance::GeneralMcst(g) => RawInstance::GeneralMcst {
            schema: SCHEMA,
            n: g.graph.n(),
            edges: graph_to_raw(&g.graph),
            bounds: g
                .bounds
                .iter()
                .map(|b| RawEdgeBound {
                    label: b.label.clone(),
                    edges: b.edges.clone(),
                    bound: b.bound.clone(),
                })
                .collect(),
        },
        AnyInstance::Intersection(i) => {
            let (r1, r2) = i.pair.tables();
            RawInstance::Intersection {
                schema: SCHEMA,
                elements: i.n(),
                costs: i.costs.clone(),
                r1: r1.to_vec(),
                r2: r2.to_vec(),
                constraints: constraints_to_raw(&i.constraints),
            }
        }
        AnyInstance::Lattice(l) => {
            let lat = &l.lattice;
            let lattice = match lat.shape() {
                LatticeShape::Powerset => RawLattice::Powerset {
                    rank: lat.ranks().to_vec(),
                },
                LatticeShape::Explicit(o) => RawLattice::Explicit {
                    members: (0..lat.len())
                        .map(|a| RawMember {
                            rho: to_indices(lat.rho(a)),
                            rank: lat.rank(a),
                        })
                        .collect(),
                    meet: o.meet.clone(),
                    join: o.join.clone(),
                },
            };
            RawInstance::Lattice {
                schema: SCHEMA,
                elements: l.n(),
                costs: l.costs.clone(),
                variant: l.variant,
                lattice,
                constraints: constraints_to_raw(&l.constraints),
            }
        }
    }
}

pub fn decode(text: &str) -> Result<AnyInstance> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Instance(format!("bad instance JSON: {e}")))?;
    from_raw(raw)
}

/// Canonical encoding: sorted keys, two-space indentation, trailing newline.
pub fn encode(inst: &AnyInstance) -> String {
    to_canonical_json(&to_raw(inst))
}

/// Serializes through `serde_json::Value`, whose maps keep keys sorted.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("in-memory values serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values render");
    s.push('\n');
    s
}

/// One-line canonical form, used for digests and JSON lines.
pub fn to_canonical_line<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("in-memory values serialize");
    serde_json::to_string(&v).expect("values render")
}

/// SHA-256 of the canonical encoding.
pub fn digest(inst: &AnyInstance) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(encode(inst).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    fn sample_mcst() -> AnyInstance {
        let g = Graph::from_edges(3, &[(0, 1, q(1, 1)), (1, 2, q(3, 2)), (0, 2, q(2, 1))]).unwrap();
        AnyInstance::Mcst(McstInstance::new(g, vec![(0b001, q(1, 1)), (0b011, q(2, 1))]).unwrap())
    }

    #[test]
    fn mcst_round_trip() {
        let inst = sample_mcst();
        let text = encode(&inst);
        assert!(text.contains("\"3/2\""));
        assert_eq!(decode(&text).unwrap(), inst);
        assert_eq!(encode(&decode(&text).unwrap()), text);
    }

    #[test]
    fn keys_are_sorted() {
        let text = encode(&sample_mcst());
        let edges = text.find("\"edges\"").unwrap();
        let family = text.find("\"family\"").unwrap();
        let schema = text.find("\"schema\"").unwrap();
        assert!(edges < family && family < schema);
    }

    #[test]
    fn rejects_floats_and_bad_schema() {
        let bad = r#"{"type":"mcst","schema":1,"n":2,"edges":[{"u":0,"v":1,"cost":0.5}],"family":[]}"#;
        assert!(decode(bad).is_err());
        let old = r#"{"type":"mcst","schema":7,"n":2,"edges":[],"family":[]}"#;
        assert!(decode(old).is_err());
    }

    #[test]
    fn lattice_and_intersection_round_trip() {
        let m = MatroidOracle::uniform(2, 3).unwrap();
        let lat = matroid_to_lattice(&m).unwrap();
        let inst = AnyInstance::Lattice(
            LatticeInstance::new(
                lat,
                vec![q(1, 1); 3],
                vec![CrossingConstraint {
                    elements: 0b011,
                    lower: Some(q(1, 1)),
                    upper: Some(q(1, 1)),
                }],
                LatticeVariant::General,
            )
            .unwrap(),
        );
        assert_eq!(decode(&encode(&inst)).unwrap(), inst);
        let pair = ContraPolymatroidPair::new(2, vec![0, 0, 0, 1], vec![0, 1, 0, 1]).unwrap();
        let inst = AnyInstance::Intersection(
            IntersectionInstance::new(pair, vec![q(1, 1), q(2, 1)], vec![CrossingConstraint::upper(0b01, q(1, 1))]).unwrap(),
        );
        assert_eq!(decode(&encode(&inst)).unwrap(), inst);
    }

    #[test]
    fn matroid_kind_accepted() {
        let text = r#"{"type":"lattice","schema":1,"elements":2,"costs":["1","1"],"variant":"inclusion",
            "lattice":{"kind":"matroid","rank":[0,1,1,1]},"constraints":[{"elements":[0,1],"upper":"1"}]}"#;
        let AnyInstance::Lattice(l) = decode(text).unwrap() else { panic!() };
        assert_eq!(l.lattice.rank(0b11), 1);
        assert_eq!(l.lattice.rank(0b01), 0);
    }
}
