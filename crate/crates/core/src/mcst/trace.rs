use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::structures::{Graph, LaminarForest, McstInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundChange {
    pub node: usize,
    pub old: Rational,
    pub new: Rational,
}

/// One sibling group handled by DropL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropLPart {
    /// `None` for the roots.
    pub parent: Option<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub merged: Vec<usize>,
    pub discarded: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    SolveLp {
        edges: Vec<usize>,
        x: Vec<Rational>,
        objective: Rational,
        rounds: usize,
        certificate_rank: usize,
        separation_clean: bool,
    },
    Tighten {
        changes: Vec<BoundChange>,
    },
    FixOne {
        edge: usize,
    },
    DropZero {
        edge: usize,
    },
    DropN {
        parity: Parity,
        dropped: Vec<usize>,
        parents: Vec<usize>,
    },
    DropL {
        parts: Vec<DropLPart>,
    },
    Done {
        tree: Vec<usize>,
        cost: Rational,
    },
}

impl TraceEvent {
    pub fn is_drop(&self) -> bool {
        matches!(self, TraceEvent::DropN { .. } | TraceEvent::DropL { .. })
    }
}

/// Forest and undecided edges at time `t` (just after drop round `t`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub forest: LaminarForest,
    pub undecided: Vec<usize>,
}

impl Snapshot {
    pub fn size(&self) -> usize {
        self.forest.len()
    }
}

/// Result of replaying a trace from its instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub tree: Vec<usize>,
    pub forest: LaminarForest,
    pub snapshots: Vec<Snapshot>,
}

pub(crate) fn fix_edge(forest: &mut LaminarForest, graph: &Graph, e: usize) {
    for id in forest.alive() {
        if graph.edge(e).crosses(forest.vertices(id)) {
            let b = forest.bound(id) - &Rational::one();
            forest.set_bound(id, b);
        }
    }
}

fn take(undecided: &mut Vec<usize>, e: usize, what: &str) -> Result<()> {
    match undecided.iter().position(|&x| x == e) {
        Some(p) => {
            undecided.remove(p);
            Ok(())
        }
        None => Err(Error::Invariant(format!("replay: {what} of edge {e} which is not undecided"))),
    }
}

/// Re-executes the state changes recorded in `trace`.
pub fn replay(instance: &McstInstance, trace: &[TraceEvent]) -> Result<Replay> {
    let graph = &instance.graph;
    let mut forest = instance.family.clone();
    let mut undecided: Vec<usize> = (0..graph.m()).collect();
    let mut tree = Vec::new();
    let mut snapshots = vec![Snapshot {
        forest: forest.clone(),
        undecided: undecided.clone(),
    }];
    let mut done = None;
    for (i, ev) in trace.iter().enumerate() {
        if done.is_some() {
            return Err(Error::Invariant(format!("replay: event {i} after done")));
        }
        match ev {
            TraceEvent::SolveLp { edges, .. } => {
                if *edges != undecided {
                    return Err(Error::Invariant(format!("replay: event {i} solved over a different edge set")));
                }
            }
            TraceEvent::Tighten { changes } => {
                for c in changes {
                    if !forest.is_alive(c.node) || *forest.bound(c.node) != c.old || c.new > c.old {
                        return Err(Error::Invariant(format!("replay: bad tighten of node {} at event {i}", c.node)));
                    }
                    forest.set_bound(c.node, c.new.clone());
                }
            }
            TraceEvent::FixOne { edge } => {
                take(&mut undecided, *edge, "fix")?;
                fix_edge(&mut forest, graph, *edge);
                tree.push(*edge);
            }
            TraceEvent::DropZero { edge } => take(&mut undecided, *edge, "delete")?,
            TraceEvent::DropN { dropped, .. } => {
                for &d in dropped {
                    if !forest.is_alive(d) {
                        return Err(Error::Invariant(format!("replay: dropping dead node {d}")));
                    }
                    forest.remove_node(d);
                }
            }
            TraceEvent::DropL { parts } => {
                for part in parts {
                    for (k, &(a, b)) in part.pairs.iter().enumerate() {
                        let live = |x: usize| forest.is_alive(x) && forest.is_leaf(x) && forest.parent(x) == part.parent;
                        if !live(a) || !live(b) {
                            return Err(Error::Invariant(format!("replay: bad DropL pair ({a}, {b})")));
                        }
                        let m = forest.merge_leaves(a, b);
                        if part.merged.get(k) != Some(&m) {
                            return Err(Error::Invariant(format!("replay: merged node id {m} does not match trace")));
                        }
                    }
                    if let Some(d) = part.discarded {
                        if !forest.is_alive(d) || !forest.is_leaf(d) {
                            return Err(Error::Invariant(format!("replay: discarding node {d}")));
                        }
                        forest.remove_node(d);
                    }
                }
            }
            TraceEvent::Done { tree: t, .. } => done = Some(t.clone()),
        }
        if ev.is_drop() {
            snapshots.push(Snapshot {
                forest: forest.clone(),
                undecided: undecided.clone(),
            });
        }
    }
    let Some(final_tree) = done else {
        return Err(Error::Invariant("replay: trace has no done event".into()));
    };
    if final_tree != tree {
        return Err(Error::Invariant("replay: final tree differs from fixed edges".into()));
    }
    if !undecided.is_empty() {
        return Err(Error::Invariant("replay: edges left undecided".into()));
    }
    Ok(Replay { tree, forest, snapshots })
}

pub fn to_json_lines(trace: &[TraceEvent]) -> Result<String> {
    let mut out = String::new();
    for ev in trace {
        out.push_str(&serde_json::to_string(ev)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn from_json_lines(text: &str) -> Result<Vec<TraceEvent>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
