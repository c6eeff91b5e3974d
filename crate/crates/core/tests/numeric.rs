use crossrelax::numeric::{rank_of_rows, simplex_solve, Constraint, LinearProgram, Relation, VarBound};
use crossrelax::{q, Rational};
use proptest::prelude::*;

fn small() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #[test]
    fn sums_reassociate(a in small(), b in small(), c in small()) {
        prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a - &b) * &c, &(&a * &c) - &(&b * &c));
    }

    #[test]
    fn render_parse_round_trip(a in small()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn big_values_stay_exact(n in 1i64..1000) {
        let big = Rational::from(i64::MAX) * Rational::from(n);
        let back: Rational = &big / &Rational::from(n);
        prop_assert_eq!(back, Rational::from(i64::MAX));
    }

    /// Reordering the rows of a feasible LP leaves its optimum unchanged.
    #[test]
    fn row_order_does_not_change_optimum(
        costs in proptest::collection::vec(0i64..6, 3),
        rows in proptest::collection::vec((proptest::collection::vec(0i64..3, 3), 0i64..4), 1..5),
        rot in 0usize..5,
    ) {
        let build = |order: &[usize]| {
            let mut lp = LinearProgram::new(costs.iter().map(|&c| Rational::from(c)).collect(), vec![VarBound::unit(); 3]);
            for &i in order {
                let (coeffs, rhs) = &rows[i];
                let sum: i64 = coeffs.iter().sum();
                lp.push(Constraint::new(
                    coeffs.iter().map(|&c| Rational::from(c)).collect(),
                    Relation::Ge,
                    Rational::from((*rhs).min(sum)),
                ));
            }
            lp
        };
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let a = simplex_solve(&build(&order)).unwrap();
        order.rotate_left(rot % rows.len());
        order.reverse();
        let lp = build(&order);
        let b = simplex_solve(&lp).unwrap();
        prop_assert_eq!(&a.objective_value, &b.objective_value);
        prop_assert!(b.verify(&lp).is_ok());
    }
}

#[test]
fn equality_forces_objective() {
    let mut lp = LinearProgram::new(vec![q(1, 1), q(1, 1)], vec![VarBound::unit(); 2]);
    lp.push(Constraint::new(vec![q(1, 1), q(1, 1)], Relation::Eq, q(2, 1)));
    let sol = simplex_solve(&lp).unwrap();
    assert_eq!(sol.values, vec![q(1, 1), q(1, 1)]);
    assert_eq!(sol.objective_value, q(2, 1));
    assert_eq!(sol.certificate_rank(&lp), 2);
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let mut lp = LinearProgram::new(vec![q(0, 1)], vec![VarBound::non_negative()]);
    lp.push(Constraint::new(vec![q(1, 1)], Relation::Ge, q(3, 1)));
    lp.push(Constraint::new(vec![q(1, 1)], Relation::Le, q(1, 1)));
    assert!(simplex_solve(&lp).is_err());
}

#[test]
fn rank_examples() {
    let r = |v: &[[i64; 2]]| v.iter().map(|x| x.iter().map(|&c| Rational::from(c)).collect()).collect::<Vec<Vec<_>>>();
    assert_eq!(rank_of_rows(&r(&[[1, 0], [0, 1]])).unwrap(), 2);
    assert_eq!(rank_of_rows(&r(&[[1, 1], [2, 2]])).unwrap(), 1);
}
