use crossrelax::generators::{random_mcst_with, rng_for};
use crossrelax::lp::{solve_to_extreme_point, tighten_degree_bounds, McstLp};
use crossrelax::mcst::{from_json_lines, replay, run, to_json_lines, verify_guarantee, TraceEvent, ALPHA};
use crossrelax::oracles::{brute_mcst, greedy_mst, EdgeBoundSet, EdgeOrder};
use crossrelax::structures::{Graph, McstInstance};
use crossrelax::{q, Rational};

fn triangle() -> Graph {
    Graph::from_edges(3, &[(0, 1, q(1, 1)), (1, 2, q(1, 1)), (0, 2, q(1, 1))]).unwrap()
}

#[test]
fn bounds_with_slack_against_brute_force() {
    for i in 0..10 {
        let inst = random_mcst_with(&mut rng_for(77, i), 8, 1).unwrap();
        let out = run(&inst).unwrap();
        let rep = verify_guarantee(&inst, &out.tree, &out.trace).unwrap();
        assert!(rep.failures.is_empty(), "instance {i}: {:?}", rep.failures);
        let brute = brute_mcst(&inst.graph, &EdgeBoundSet::from_laminar(&inst), EdgeOrder::Forward).unwrap();
        let (opt, _) = brute.optimum.expect("bounds come from a real tree");
        assert!(rep.lp_optimum <= opt, "LP {} above integral optimum {opt}", rep.lp_optimum);
        assert!(out.cost <= opt);
        let additive = Rational::from((4 * ALPHA * out.drop_rounds()) as i64);
        for (set, b) in inst.sets() {
            let load = Rational::from(inst.graph.cut_load(&out.tree, set));
            assert!(load <= &b + &additive);
        }
    }
}

#[test]
fn brute_optimum_never_below_lp() {
    for i in 0..10 {
        let inst = random_mcst_with(&mut rng_for(78, i), 8, 0).unwrap();
        let lp = McstLp::new(&inst.graph, (0..inst.graph.m()).collect(), vec![], &inst.family);
        let sol = solve_to_extreme_point(&lp).unwrap();
        assert!(sol.certified && sol.separation_clean);
        let fwd = brute_mcst(&inst.graph, &EdgeBoundSet::from_laminar(&inst), EdgeOrder::Forward).unwrap();
        let rev = brute_mcst(&inst.graph, &EdgeBoundSet::from_laminar(&inst), EdgeOrder::Reverse).unwrap();
        assert_eq!(fwd.tree_count, rev.tree_count);
        assert_eq!(fwd.optimum.as_ref().map(|o| &o.0), rev.optimum.as_ref().map(|o| &o.0));
        let (opt, _) = fwd.optimum.unwrap();
        assert!(*sol.objective() <= opt);
    }
}

#[test]
fn no_bounds_matches_greedy_mst() {
    let inst = random_mcst_with(&mut rng_for(79, 0), 7, 0).unwrap();
    let brute = brute_mcst(&inst.graph, &[], EdgeOrder::Forward).unwrap();
    assert_eq!(brute.optimum.map(|o| o.0), greedy_mst(&inst.graph).map(|g| g.0));
}

#[test]
fn trace_survives_json_and_replays() {
    let inst = random_mcst_with(&mut rng_for(80, 3), 9, 0).unwrap();
    let out = run(&inst).unwrap();
    let text = to_json_lines(&out.trace).unwrap();
    let back = from_json_lines(&text).unwrap();
    assert_eq!(back, out.trace);
    let rep = replay(&inst, &back).unwrap();
    assert_eq!(rep.tree, out.tree);
    assert!(matches!(back.last(), Some(TraceEvent::Done { .. })));
}

#[test]
fn zero_drop_rounds_meet_bounds_exactly() {
    let mut seen = 0;
    for i in 0..40 {
        let inst = random_mcst_with(&mut rng_for(81, i), 6, 0).unwrap();
        let out = run(&inst).unwrap();
        if out.drop_rounds() > 0 {
            continue;
        }
        seen += 1;
        for (set, b) in inst.sets() {
            assert!(Rational::from(inst.graph.cut_load(&out.tree, set)) <= b);
        }
    }
    assert!(seen > 0);
}

#[test]
fn triangle_tighten_keeps_tight_bound() {
    let g = triangle();
    let inst = McstInstance::new(g, vec![(0b001, q(2, 1))]).unwrap();
    let lp = McstLp::new(&inst.graph, vec![0, 1, 2], vec![], &inst.family);
    let sol = solve_to_extreme_point(&lp).unwrap();
    assert_eq!(*sol.objective(), q(2, 1));
    let mut forest = inst.family.clone();
    let changes = tighten_degree_bounds(&mut forest, &inst.graph, &[0, 1, 2], sol.values()).unwrap();
    let load: Rational = [0usize, 2].iter().map(|&e| sol.values()[e].clone()).sum();
    if load == q(2, 1) {
        assert!(changes.is_empty());
        assert_eq!(*forest.bound(0), q(2, 1));
    } else {
        assert_eq!(*forest.bound(0), load);
    }
}

#[test]
fn spanning_tree_input_is_returned_whole() {
    let g = Graph::from_edges(4, &[(0, 1, q(3, 1)), (1, 2, q(1, 1)), (1, 3, q(2, 1))]).unwrap();
    let inst = McstInstance::new(g, vec![(0b0010, q(3, 1)), (0b0011, q(2, 1))]).unwrap();
    let out = run(&inst).unwrap();
    assert_eq!(out.tree, vec![0, 1, 2]);
    assert_eq!(out.cost, out.initial_objective);
}
