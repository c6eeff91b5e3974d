//! Iterative relaxation for minimum crossing spanning tree with degree
//! bounds on a laminar family.

mod local;
mod trace;
mod verify;

pub use local::{classify_good, local_edges, max_locality};
pub use trace::{from_json_lines, replay, to_json_lines, BoundChange, DropLPart, Parity, Replay, Snapshot, TraceEvent};
pub use verify::{drop_round_limit, verify_guarantee, GuaranteeReport};

use crate::error::{Error, Result};
use crate::lp::{solve_to_extreme_point, tighten_degree_bounds, ExtremePoint, LpStats, McstLp};
use crate::numeric::Rational;
use crate::structures::{Graph, LaminarForest, McstInstance};

pub const ALPHA: usize = 24;

/// An undecided edge is local to at most this many nodes.
pub const MAX_LOCALITY: usize = 6;

#[derive(Debug, Clone)]
pub struct McstState {
    pub fixed: Vec<usize>,
    pub undecided: Vec<usize>,
    pub forest: LaminarForest,
}

impl McstState {
    pub fn initial(instance: &McstInstance) -> Self {
        McstState {
            fixed: Vec::new(),
            undecided: (0..instance.graph.m()).collect(),
            forest: instance.family.clone(),
        }
    }

    fn dump(&self, x: &[Rational]) -> String {
        format!(
            "fixed={:?} undecided={:?} x={:?} forest={}",
            self.fixed,
            self.undecided,
            x.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            serde_json::to_string(&self.forest).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepTaken {
    FixOne(usize),
    DropZero(usize),
    DropN,
    DropL,
}

#[derive(Debug, Clone)]
pub struct McstRun {
    pub tree: Vec<usize>,
    pub cost: Rational,
    pub initial_objective: Rational,
    pub trace: Vec<TraceEvent>,
    pub snapshots: Vec<Snapshot>,
    pub final_forest: LaminarForest,
    pub lp_stats: LpStats,
}

impl McstRun {
    pub fn drop_rounds(&self) -> usize {
        self.trace.iter().filter(|e| e.is_drop()).count()
    }
}

/// Applies the first applicable step in the order fix, delete, DropN,
/// DropL. `x[i]` belongs to `state.undecided[i]`, and bounds must already
/// be tightened.
pub fn try_step(state: &mut McstState, graph: &Graph, x: &[Rational], trace: &mut Vec<TraceEvent>) -> Result<StepTaken> {
    if let Some(i) = x.iter().position(|v| v.is_one()) {
        let e = state.undecided.remove(i);
        trace::fix_edge(&mut state.forest, graph, e);
        state.fixed.push(e);
        trace.push(TraceEvent::FixOne { edge: e });
        return Ok(StepTaken::FixOne(e));
    }
    if let Some(i) = x.iter().position(|v| v.is_zero()) {
        let e = state.undecided.remove(i);
        trace.push(TraceEvent::DropZero { edge: e });
        return Ok(StepTaken::DropZero(e));
    }

    let size = state.forest.len();
    let (good_non_leaves, good_leaves) = classify_good(&state.forest, graph, &state.undecided, ALPHA);

    if size > 0 && 4 * good_non_leaves.len() >= size {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for &id in &good_non_leaves {
            if state.forest.level(id)? % 2 == 0 {
                even.push(id);
            } else {
                odd.push(id);
            }
        }
        let chosen = if 8 * even.len() >= size {
            Some((Parity::Even, even))
        } else if 8 * odd.len() >= size {
            Some((Parity::Odd, odd))
        } else {
            None
        };
        if let Some((parity, parents)) = chosen.filter(|(_, m)| !m.is_empty()) {
            let dropped: Vec<usize> = parents.iter().flat_map(|&m| state.forest.children(m).to_vec()).collect();
            for &d in &dropped {
                state.forest.remove_node(d);
            }
            trace.push(TraceEvent::DropN {
                parity,
                dropped,
                parents,
            });
            return Ok(StepTaken::DropN);
        }
    }

    if 4 * good_leaves.len() > size {
        let mut groups: Vec<(Option<usize>, Vec<usize>)> = Vec::new();
        let mut parents: Vec<Option<usize>> = good_leaves.iter().map(|&l| state.forest.parent(l)).collect();
        parents.sort();
        parents.dedup();
        for p in parents {
            let members: Vec<usize> = state
                .forest
                .sibling_list(p)
                .iter()
                .copied()
                .filter(|c| good_leaves.contains(c))
                .collect();
            groups.push((p, members));
        }
        let mut parts = Vec::new();
        for (parent, members) in groups {
            let mut pairs = Vec::new();
            let mut merged = Vec::new();
            for pair in members.chunks_exact(2) {
                merged.push(state.forest.merge_leaves(pair[0], pair[1]));
                pairs.push((pair[0], pair[1]));
            }
            let discarded = if members.len() % 2 == 1 { members.last().copied() } else { None };
            if let Some(d) = discarded {
                state.forest.remove_node(d);
            }
            parts.push(DropLPart {
                parent,
                pairs,
                merged,
                discarded,
            });
        }
        trace.push(TraceEvent::DropL { parts });
        return Ok(StepTaken::DropL);
    }

    Err(Error::Invariant(format!(
        "no step applies: |L|={size}, good non-leaves={good_non_leaves:?}, good leaves={good_leaves:?}; {}",
        state.dump(x)
    )))
}

fn check_accounting(state: &McstState, instance: &McstInstance, graph: &Graph) -> Result<()> {
    let original = instance.family.capacity();
    for id in state.forest.alive() {
        let b = state.forest.bound(id);
        if b.is_negative() {
            return Err(Error::Invariant(format!("node {id} has negative bound {b}")));
        }
        if id < original {
            let set = state.forest.vertices(id);
            let used = state.fixed.iter().filter(|&&e| graph.edge(e).crosses(set)).count();
            if b + &Rational::from(used) > *instance.family.bound(id) {
                return Err(Error::Invariant(format!("degree accounting broken at node {id}")));
            }
        }
    }
    Ok(())
}

/// One LP solve of the current state, with the solve error mapped by
/// whether it is the first solve.
pub fn solve_state(state: &McstState, graph: &Graph, first: bool) -> Result<ExtremePoint> {
    let lp = McstLp::new(graph, state.undecided.clone(), state.fixed.clone(), &state.forest);
    solve_to_extreme_point(&lp).map_err(|e| match e {
        Error::Infeasible(m) if !first => Error::Invariant(format!("LP became infeasible mid-run: {m}")),
        Error::Infeasible(m) => Error::Infeasible(format!("initial MCST relaxation: {m}")),
        other => other,
    })
}

pub fn run(instance: &McstInstance) -> Result<McstRun> {
    let graph = &instance.graph;
    let mut state = McstState::initial(instance);
    let mut trace = Vec::new();
    let mut snapshots = vec![Snapshot {
        forest: state.forest.clone(),
        undecided: state.undecided.clone(),
    }];
    let mut initial_objective = None;
    let mut lp_stats = LpStats::default();
    let mut last_objective: Option<Rational> = None;

    while !state.undecided.is_empty() || initial_objective.is_none() {
        let sol = solve_state(&state, graph, initial_objective.is_none())?;
        lp_stats.record(&sol);
        let x = sol.values().to_vec();
        if !sol.certified {
            return Err(Error::Invariant("LP solution is not a certified vertex".into()));
        }
        // c(F) + z_cur never increases.
        let total = graph.cost_of(&state.fixed) + sol.objective();
        if let Some(prev) = &last_objective {
            if total > *prev {
                return Err(Error::Invariant(format!("c(F) + LP rose from {prev} to {total}")));
            }
        }
        last_objective = Some(total);
        initial_objective.get_or_insert_with(|| sol.objective().clone());
        trace.push(TraceEvent::SolveLp {
            edges: state.undecided.clone(),
            x: x.clone(),
            objective: sol.objective().clone(),
            rounds: sol.rounds(),
            certificate_rank: sol.certificate_rank(),
            separation_clean: sol.separation_clean,
        });
        if state.undecided.is_empty() {
            break;
        }
        let changes = tighten_degree_bounds(&mut state.forest, graph, &state.undecided, &x)?;
        if !changes.is_empty() {
            trace.push(TraceEvent::Tighten {
                changes: changes
                    .into_iter()
                    .map(|(node, old, new)| BoundChange { node, old, new })
                    .collect(),
            });
        }
        let (hits, edge) = max_locality(&state.forest, graph, &state.undecided);
        if hits > MAX_LOCALITY {
            return Err(Error::Invariant(format!("edge {edge:?} is local to {hits} nodes")));
        }
        let step = try_step(&mut state, graph, &x, &mut trace)?;
        check_accounting(&state, instance, graph)?;
        if let Err(e) = state.forest.check() {
            return Err(Error::Invariant(format!("forest broken after {step:?}: {e}")));
        }
        if matches!(step, StepTaken::DropN | StepTaken::DropL) {
            snapshots.push(Snapshot {
                forest: state.forest.clone(),
                undecided: state.undecided.clone(),
            });
        }
    }

    if !graph.is_spanning_tree(&state.fixed) {
        return Err(Error::Invariant("output is not a spanning tree".into()));
    }
    let cost = graph.cost_of(&state.fixed);
    let initial_objective = initial_objective.expect("at least one solve");
    if cost > initial_objective {
        return Err(Error::Invariant(format!("tree cost {cost} exceeds LP optimum {initial_objective}")));
    }
    trace.push(TraceEvent::Done {
        tree: state.fixed.clone(),
        cost: cost.clone(),
    });
    Ok(McstRun {
        tree: state.fixed,
        cost,
        initial_objective,
        trace,
        snapshots,
        final_forest: state.forest,
        lp_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    fn inst(n: usize, edges: &[(usize, usize, i64)], sets: Vec<(u64, Rational)>) -> McstInstance {
        let e: Vec<_> = edges.iter().map(|&(u, v, c)| (u, v, Rational::from(c))).collect();
        McstInstance::new(Graph::from_edges(n, &e).unwrap(), sets).unwrap()
    }

    #[test]
    fn tree_input_keeps_all_edges() {
        let i = inst(4, &[(0, 1, 3), (1, 2, 1), (1, 3, 2)], vec![(0b0010, q(3, 1))]);
        let r = run(&i).unwrap();
        let mut t = r.tree.clone();
        t.sort();
        assert_eq!(t, vec![0, 1, 2]);
        assert_eq!(r.cost, r.initial_objective);
    }

    #[test]
    fn triangle_unit_costs() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], vec![]);
        let r = run(&i).unwrap();
        assert_eq!(r.tree.len(), 2);
        assert_eq!(r.cost, q(2, 1));
        let rep = replay(&i, &r.trace).unwrap();
        assert_eq!(rep.tree, r.tree);
        assert_eq!(rep.forest, r.final_forest);
    }

    #[test]
    fn infeasible_bounds_are_instance_errors() {
        // Vertex 0 needs degree at least 1 but is bounded by 0.
        let i = inst(3, &[(0, 1, 1), (1, 2, 1)], vec![(0b001, q(0, 1))]);
        assert!(matches!(run(&i), Err(Error::Infeasible(_))));
    }

    #[test]
    fn drop_l_pairs_good_leaves() {
        // Three sibling leaves under a root, all good; no LP involved.
        let sets = vec![(0b1111, q(9, 1)), (0b0001, q(1, 1)), (0b0010, q(2, 1)), (0b0100, q(3, 1))];
        let i = inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], sets);
        let mut state = McstState::initial(&i);
        // Make the root look like a leaf-free region: remove it to leave three good leaves.
        state.forest.remove_node(0);
        let mut trace = Vec::new();
        let x = vec![q(1, 2); 4];
        let step = try_step(&mut state, &i.graph, &x, &mut trace).unwrap();
        assert_eq!(step, StepTaken::DropL);
        let TraceEvent::DropL { parts } = &trace[0] else {
            panic!("expected DropL")
        };
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].pairs, vec![(1, 2)]);
        assert_eq!(parts[0].discarded, Some(3));
        let m = parts[0].merged[0];
        assert_eq!(state.forest.vertices(m), 0b0011);
        assert_eq!(*state.forest.bound(m), q(3, 1));
        assert_eq!(state.forest.roots(), &[m]);
    }

    #[test]
    fn drop_n_prefers_even_levels() {
        // 8 nodes: two roots with three leaf children each.
        let sets = vec![
            (0b000111, q(5, 1)),
            (0b111000, q(5, 1)),
            (0b000001, q(1, 1)),
            (0b000010, q(1, 1)),
            (0b000100, q(1, 1)),
            (0b001000, q(1, 1)),
            (0b010000, q(1, 1)),
            (0b100000, q(1, 1)),
        ];
        let edges: Vec<(usize, usize, i64)> = (0..6).map(|i| (i, (i + 1) % 6, 1)).collect();
        let i = inst(6, &edges, sets);
        let mut state = McstState::initial(&i);
        let mut trace = Vec::new();
        let step = try_step(&mut state, &i.graph, &vec![q(1, 2); 6], &mut trace).unwrap();
        assert_eq!(step, StepTaken::DropN);
        let TraceEvent::DropN { parity, dropped, parents } = &trace[0] else {
            panic!("expected DropN")
        };
        assert_eq!(*parity, Parity::Even);
        assert_eq!(parents, &vec![0, 1]);
        assert_eq!(dropped, &vec![2, 3, 4, 5, 6, 7]);
        assert_eq!(state.forest.len(), 2);
    }

    #[test]
    fn integral_steps_first() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1)], vec![]);
        let mut state = McstState::initial(&i);
        let mut trace = Vec::new();
        let s = try_step(&mut state, &i.graph, &[q(0, 1), q(1, 1)], &mut trace).unwrap();
        assert_eq!(s, StepTaken::FixOne(1));
        let s = try_step(&mut state, &i.graph, &[q(0, 1)], &mut trace).unwrap();
        assert_eq!(s, StepTaken::DropZero(0));
    }
}
