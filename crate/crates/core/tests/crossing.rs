use crossrelax::bits::full;
use crossrelax::crossing::{check_chain_token_bound, check_monotonicity_star, run_intersection, run_lattice, verify_intersection, verify_lattice};
use crossrelax::generators::gap::{planar_path_lattice, planar_segment};
use crossrelax::generators::{gen_edge_cover_tight, initial_cover_lp};
use crossrelax::lp::{separate_contra_polymatroid, separate_lattice, solve_to_extreme_point, SeparationResult};
use crossrelax::structures::{CrossingConstraint, LatticeInstance, LatticeOracle, LatticeVariant};
use crossrelax::{q, Rational};

#[test]
fn planar_k2_separation() {
    let lat = planar_path_lattice(2).unwrap();
    let n = lat.ground();
    assert_eq!(n, 8);
    assert!(separate_lattice(&lat, full(n), 0, &vec![q(1, 4); n]).is_feasible());
    let SeparationResult::Violated(v) = separate_lattice(&lat, full(n), 0, &vec![q(1, 8); n]) else {
        panic!("eighths are too thin to cover a path");
    };
    assert_eq!(v.lhs, q(1, 2));
    assert_eq!(v.rhs, q(1, 1));
    assert!(v.reverify(&vec![q(1, 8); n]));
}

#[test]
fn planar_lattice_fails_star_but_diamond_passes() {
    let lat = planar_path_lattice(2).unwrap();
    let (a, b) = check_monotonicity_star(&lat).expect("paths all have 2k edges");
    assert!(lat.leq(a, b) && a != b);
    assert_eq!(lat.rho(a).count_ones(), lat.rho(b).count_ones());
    assert_eq!(planar_segment(2, 0).count_ones(), 4);

    // {0} < {0,1}, {0,2} < {0,1,2}; the middle pair is incomparable with equal sizes.
    let rho = vec![0b001, 0b011, 0b101, 0b111];
    let meet = vec![vec![0, 0, 0, 0], vec![0, 1, 0, 1], vec![0, 0, 2, 2], vec![0, 1, 2, 3]];
    let join = vec![vec![0, 1, 2, 3], vec![1, 1, 3, 3], vec![2, 3, 2, 3], vec![3, 3, 3, 3]];
    let diamond = LatticeOracle::explicit(3, rho, vec![1, 1, 1, 2], meet, join).unwrap();
    assert_eq!(check_monotonicity_star(&diamond), None);
    assert!(!diamond.comparable(1, 2));
    let inst = LatticeInstance::new(
        diamond,
        vec![q(1, 1), q(2, 1), q(2, 1)],
        vec![CrossingConstraint::upper(0b110, q(1, 1))],
        LatticeVariant::General,
    )
    .unwrap();
    let out = run_lattice(&inst).unwrap();
    let rep = verify_lattice(&inst, out.solution).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    assert_eq!(rep.brute_optimum, Some(q(3, 1)));
}

#[test]
fn four_cycle_half_point() {
    let inst = gen_edge_cover_tight(1).unwrap();
    let lp = initial_cover_lp(&inst);
    let sol = solve_to_extreme_point(&lp).unwrap();
    assert_eq!(sol.values(), &vec![q(1, 2); 4][..]);
    assert_eq!(sol.certificate_rank(), 4);
    for function in 1..=2 {
        let rep = check_chain_token_bound(&inst, &sol, full(4), 0, function).unwrap();
        assert!(rep.ok);
        assert!(rep.chain_len <= 2);
        assert_eq!(rep.total, q(2, 1));
    }
}

#[test]
fn edge_cover_separation() {
    let inst = gen_edge_cover_tight(2).unwrap();
    let n = inst.n();
    assert!(separate_contra_polymatroid(&inst.pair, full(n), 0, &vec![q(1, 2); n]).is_feasible());
    let SeparationResult::Violated(v) = separate_contra_polymatroid(&inst.pair, full(n), 0, &vec![q(1, 4); n]) else {
        panic!("quarters leave stars uncovered");
    };
    assert!(v.lhs < v.rhs);
    assert!(v.reverify(&vec![q(1, 4); n]));
}

#[test]
fn edge_cover_runs_within_guarantee() {
    for n in 1..=3 {
        let inst = gen_edge_cover_tight(n).unwrap();
        let out = run_intersection(&inst).unwrap();
        assert_eq!(out.initial_objective, Rational::from(2 * n));
        let rep = verify_intersection(&inst, out.solution, &out.initial_objective);
        assert!(rep.passed(), "n = {n}: {:?}", rep.failures);
        assert!(rep.covers);
    }
}
