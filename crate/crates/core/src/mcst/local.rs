use crate::structures::{Graph, LaminarForest};

/// Undecided edges local to `s`: at least one endpoint in `s`, and neither
/// inside nor leaving both `C` and `s` for any grandchild `C` of `s`.
pub fn local_edges(forest: &LaminarForest, graph: &Graph, undecided: &[usize], s: usize) -> Vec<usize> {
    let set = forest.vertices(s);
    let grandchildren: Vec<u64> = forest.grandchildren(s).into_iter().map(|c| forest.vertices(c)).collect();
    undecided
        .iter()
        .copied()
        .filter(|&e| {
            let ed = graph.edge(e);
            if !ed.touches(set) {
                return false;
            }
            !grandchildren
                .iter()
                .any(|&c| ed.inside(c) || (ed.crosses(c) && ed.crosses(set)))
        })
        .collect()
}

/// Alive good nodes split into non-leaves and leaves, each in id order.
pub fn classify_good(forest: &LaminarForest, graph: &Graph, undecided: &[usize], alpha: usize) -> (Vec<usize>, Vec<usize>) {
    let mut non_leaves = Vec::new();
    let mut leaves = Vec::new();
    for id in forest.alive() {
        if local_edges(forest, graph, undecided, id).len() <= alpha {
            if forest.is_leaf(id) {
                leaves.push(id);
            } else {
                non_leaves.push(id);
            }
        }
    }
    (non_leaves, leaves)
}

/// Largest number of alive nodes any single undecided edge is local to.
pub fn max_locality(forest: &LaminarForest, graph: &Graph, undecided: &[usize]) -> (usize, Option<usize>) {
    let mut hits = vec![0usize; graph.m()];
    for id in forest.alive() {
        for e in local_edges(forest, graph, undecided, id) {
            hits[e] += 1;
        }
    }
    undecided
        .iter()
        .map(|&e| (hits[e], Some(e)))
        .max_by_key(|&(h, e)| (h, std::cmp::Reverse(e)))
        .unwrap_or((0, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::from_indices;
    use crate::numeric::Rational;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, Rational::zero())).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn brute_local(forest: &LaminarForest, graph: &Graph, undecided: &[usize], s: usize) -> Vec<usize> {
        let set = forest.vertices(s);
        let mut gc = Vec::new();
        for &c in forest.children(s) {
            gc.extend_from_slice(forest.children(c));
        }
        let mut out = Vec::new();
        for &e in undecided {
            let ed = graph.edge(e);
            let (u_in, v_in) = (set >> ed.u & 1 == 1, set >> ed.v & 1 == 1);
            if !(u_in || v_in) {
                continue;
            }
            let mut excluded = false;
            for &c in &gc {
                let cs = forest.vertices(c);
                let (cu, cv) = (cs >> ed.u & 1 == 1, cs >> ed.v & 1 == 1);
                if cu && cv {
                    excluded = true;
                }
                if cu != cv && u_in != v_in {
                    excluded = true;
                }
            }
            if !excluded {
                out.push(e);
            }
        }
        out
    }

    #[test]
    fn no_grandchildren_keeps_all_touching_edges() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let f = LaminarForest::from_sets(vec![(0b0011, Rational::one()), (0b0001, Rational::one())]).unwrap();
        assert_eq!(local_edges(&f, &g, &[0, 1, 2], 0), vec![0, 1]);
    }

    #[test]
    fn three_level_chain() {
        // {1,2,3,4} ⊃ {1,2} ⊃ {1}, relabelled to 0-based vertices 0..3.
        let g = graph(4, &[(0, 1), (0, 2), (2, 3)]);
        let f = LaminarForest::from_sets(vec![
            (0b1111, Rational::one()),
            (0b0011, Rational::one()),
            (0b0001, Rational::one()),
        ])
        .unwrap();
        assert_eq!(local_edges(&f, &g, &[0, 1, 2], 0), vec![0, 1, 2]);
        assert_eq!(local_edges(&f, &g, &[0, 1, 2], 0), brute_local(&f, &g, &[0, 1, 2], 0));
    }

    #[test]
    fn figure_style_configuration() {
        // S = 0..9 (vertex 9 outside the children), children B1 = {0..3},
        // B2 = {4..7}, grandchildren C1={0,1}, C2={2,3}, C3={4,5}, C4={6,7};
        // vertex 10 lies outside S.
        let g = graph(11, &[(0, 1), (1, 10), (0, 8), (2, 4), (5, 6), (8, 9), (3, 2)]);
        let sets = vec![
            (from_indices(0..10), Rational::one()),
            (from_indices(0..4), Rational::one()),
            (from_indices(4..8), Rational::one()),
            (from_indices([0, 1]), Rational::one()),
            (from_indices([2, 3]), Rational::one()),
            (from_indices([4, 5]), Rational::one()),
            (from_indices([6, 7]), Rational::one()),
        ];
        let f = LaminarForest::from_sets(sets).unwrap();
        let ids: Vec<usize> = (0..7).collect();
        let local = local_edges(&f, &g, &ids, 0);
        // inside C1, C1 leaving S, and inside C2 are excluded.
        assert_eq!(local, vec![2, 3, 4, 5]);
        assert_eq!(local, brute_local(&f, &g, &ids, 0));
    }

    #[test]
    fn matches_brute_force_on_random_forests() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = 8;
            let mut edges = Vec::new();
            for _ in 0..12 {
                let u = rng.random_range(0..n);
                let v = (u + rng.random_range(1..n)) % n;
                edges.push((u, v));
            }
            let g = graph(n, &edges);
            // random nested chain of sets plus a disjoint pair
            let mut sets = Vec::new();
            let mut cur = crate::bits::full(n);
            while cur.count_ones() > 1 {
                sets.push((cur, Rational::one()));
                let drop = crate::bits::bits(cur).nth(rng.random_range(0..cur.count_ones() as usize)).unwrap();
                cur &= !(1 << drop);
            }
            let f = LaminarForest::from_sets(sets).unwrap();
            let ids: Vec<usize> = (0..g.m()).collect();
            for s in f.alive() {
                assert_eq!(local_edges(&f, &g, &ids, s), brute_local(&f, &g, &ids, s));
            }
            assert!(max_locality(&f, &g, &ids).0 <= 6);
        }
    }

    #[test]
    fn goodness_boundary() {
        // 25 parallel edges leaving {0}: local count 25, then 24.
        let edges: Vec<(usize, usize)> = (0..25).map(|_| (0, 1)).collect();
        let g = graph(2, &edges);
        let f = LaminarForest::from_sets(vec![(0b01, Rational::one())]).unwrap();
        let all: Vec<usize> = (0..25).collect();
        assert_eq!(classify_good(&f, &g, &all, 24), (vec![], vec![]));
        assert_eq!(classify_good(&f, &g, &all[..24], 24), (vec![], vec![0]));
    }
}
