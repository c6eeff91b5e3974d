use crossrelax::bits::{bit, full};
use crossrelax::generators::gap::gadget_graph;
use crossrelax::generators::{
    check_reduction, gen_edge_cover_tight, gen_mcst_gap, gen_planar_mincut_gap, initial_cover_lp, UniformCrossing,
};
use crossrelax::lp::pin_optimum;
use crossrelax::oracles::{brute_subset_opt, enumerate_spanning_trees, kirchhoff_count, EdgeOrder, for_each_spanning_tree};
use crossrelax::structures::Graph;
use crossrelax::{q, Rational};

fn unit_graph(v: usize, edges: &[(usize, usize)]) -> Graph {
    let weighted: Vec<_> = edges.iter().map(|&(a, b)| (a, b, q(1, 1))).collect();
    Graph::from_edges(v, &weighted).unwrap()
}

#[test]
fn small_tree_counts() {
    let triangle = unit_graph(3, &[(0, 1), (1, 2), (0, 2)]);
    assert_eq!(enumerate_spanning_trees(&triangle).unwrap().len(), 3);
    assert_eq!(kirchhoff_count(&triangle), q(3, 1));
    let square = unit_graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    assert_eq!(enumerate_spanning_trees(&square).unwrap().len(), 4);
    let k4 = unit_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    assert_eq!(kirchhoff_count(&k4), q(16, 1));
    let rev = for_each_spanning_tree(&k4, EdgeOrder::Reverse, |_| {}).unwrap();
    assert_eq!(rev, 16);
}

#[test]
fn gadget_tree_count_matches_kirchhoff() {
    for e in 1..=3 {
        let g = gadget_graph(e).unwrap();
        let n = enumerate_spanning_trees(&g).unwrap().len();
        assert_eq!(Rational::from(n), kirchhoff_count(&g));
        assert_eq!(n, 4usize.pow(e as u32));
    }
}

#[test]
fn mcst_gap_e16() {
    let gap = gen_mcst_gap(16).unwrap();
    let r = &gap.report;
    assert!(r.passed(), "{:?}", r.failures);
    assert!(r.lp_feasible);
    assert_eq!(r.discrepancy, Some(2));
    assert!(r.integral_min_violation >= r.required_violation);
    assert_eq!(r.integral_min_violation, r.reverse_min_violation);
}

#[test]
fn planar_gap_k4() {
    let gap = gen_planar_mincut_gap(4).unwrap();
    let r = &gap.report;
    assert!(r.passed(), "{:?}", r.failures);
    assert!(r.lp_feasible);
    assert_eq!(r.integral_min_violation, q(3, 1));
    assert_eq!(r.reverse_min_violation, q(3, 1));
    assert!(gen_planar_mincut_gap(5).is_err());
}

#[test]
fn edge_cover_optimum_is_pinned() {
    for n in 2..=3 {
        let inst = gen_edge_cover_tight(n).unwrap();
        let rep = pin_optimum(&initial_cover_lp(&inst)).unwrap();
        assert!(rep.pinned());
        assert_eq!(rep.optimum, Rational::from(2 * n));
        assert!(rep.point.iter().all(|x| *x == q(1, 2)));
        assert_eq!(rep.auxiliary_solves(), 8 * n);
    }
}

#[test]
fn reduction_agrees_with_subset_oracle() {
    let families = [
        (4, 2, vec![(bit(0) | bit(1), 1), (bit(2) | bit(3), 1)]),
        (4, 2, vec![(bit(0) | bit(1) | bit(2), 0)]),
        (4, 3, vec![(full(4), 3), (bit(3), 0)]),
    ];
    for (e, t, bounds) in families {
        let src = UniformCrossing::new(e, t, bounds.clone()).unwrap();
        let rep = check_reduction(&src).unwrap();
        assert!(rep.passed(), "{bounds:?}: {:?}", rep.failures);
        assert_eq!(rep.tree_count, 4u64.pow(e as u32));
        let oracle = brute_subset_opt(
            e,
            |b| b.count_ones() as usize == t && bounds.iter().all(|&(c, bc)| (b & c).count_ones() as i64 <= bc),
            |_| Rational::zero(),
        )
        .unwrap();
        assert_eq!(rep.feasible_basis.is_some(), oracle.is_some());
        assert_eq!(rep.yes_tree_feasible, oracle.is_some());
        assert_eq!(rep.min_tree_violation.is_zero(), oracle.is_some());
    }
}

#[test]
fn subset_oracle_examples() {
    let costs = [q(3, 1), q(1, 1), q(2, 1)];
    let cost = |s: u64| (0..3).filter(|&i| s & bit(i) != 0).map(|i| costs[i].clone()).sum();
    let best = brute_subset_opt(3, |s| s.count_ones() >= 2, cost).unwrap();
    assert_eq!(best, Some((q(3, 1), 0b110)));
    // Ties break towards the smaller set.
    let tie = brute_subset_opt(2, |s| s != 0, |_| q(1, 1)).unwrap();
    assert_eq!(tie.map(|t| t.1), Some(0b01));
    assert_eq!(brute_subset_opt(2, |_| false, |_| q(0, 1)).unwrap(), None);
    assert!(brute_subset_opt(64, |_| true, |_| q(0, 1)).is_err());
}
