//! Seeded random instances for the test corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{bit, bits, count, full, is_subset};
use crate::crossing::intersection_lp_optimum;
use crate::error::{Error, Result};
use crate::lp::{solve_to_extreme_point, LatticeLp};
use crate::numeric::Rational;
use crate::structures::{
    matroid_to_lattice, max_frequency, ContraPolymatroidPair, CrossingConstraint, Graph, IntersectionInstance,
    LatticeInstance, LatticeVariant, MatroidOracle, McstInstance, UnionFind,
};

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    // Each instance gets its own stream so corpora can be built in parallel.
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index)
}

fn random_connected_graph(rng: &mut impl Rng, n: usize, extra_p: f64) -> Result<Graph> {
    let mut g = Graph::new(n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut tree_pairs = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        tree_pairs.push((order[i].min(order[j]), order[i].max(order[j])));
    }
    let mut pairs = tree_pairs.clone();
    for u in 0..n {
        for v in u + 1..n {
            if !tree_pairs.contains(&(u, v)) && rng.random_bool(extra_p) {
                pairs.push((u, v));
            }
        }
    }
    pairs.shuffle(rng);
    for (u, v) in pairs {
        g.add_edge(u, v, Rational::from(rng.random_range(1..=10i64)))?;
    }
    Ok(g)
}

fn random_spanning_tree(rng: &mut impl Rng, g: &Graph) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..g.m()).collect();
    ids.shuffle(rng);
    let mut uf = UnionFind::new(g.n());
    let mut t: Vec<usize> = ids.into_iter().filter(|&e| uf.union(g.edge(e).u, g.edge(e).v)).collect();
    t.sort_unstable();
    t
}

fn laminar_with(sets: &[u64], s: u64) -> bool {
    sets.iter().all(|&t| s & t == 0 || is_subset(s, t) || is_subset(t, s))
}

/// Random laminar family of distinct non-empty sets, at most `2n - 1` of them.
fn random_laminar(rng: &mut impl Rng, n: usize) -> Vec<u64> {
    let target = rng.random_range(1..=2 * n - 1);
    let mut sets: Vec<u64> = Vec::new();
    for _ in 0..400 {
        if sets.len() >= target {
            break;
        }
        let cand = if !sets.is_empty() && rng.random_bool(0.5) {
            // a random subset of an existing set
            let base = sets[rng.random_range(0..sets.len())];
            bits(base).filter(|_| rng.random_bool(0.5)).fold(0, |m, v| m | bit(v))
        } else {
            (0..n).filter(|_| rng.random_bool(0.4)).fold(0, |m, v| m | bit(v))
        };
        if cand != 0 && !sets.contains(&cand) && laminar_with(&sets, cand) {
            sets.push(cand);
        }
    }
    sets
}

/// Random connected graph on 5..=10 vertices, random laminar family, and
/// bounds equal to the cut loads of a random spanning tree.
pub fn random_mcst(rng: &mut impl Rng) -> Result<McstInstance> {
    let n = rng.random_range(5..=10);
    random_mcst_with(rng, n, 0)
}

/// As [`random_mcst`] with a fixed vertex count and bounds `load + slack`.
pub fn random_mcst_with(rng: &mut impl Rng, n: usize, slack: usize) -> Result<McstInstance> {
    let g = random_connected_graph(rng, n, 0.3)?;
    let tree = random_spanning_tree(rng, &g);
    let sets: Vec<(u64, Rational)> = random_laminar(rng, n)
        .into_iter()
        .map(|s| (s, Rational::from(g.cut_load(&tree, s) + slack)))
        .collect();
    McstInstance::new(g, sets)
}

fn random_supermodular(rng: &mut impl Rng, n: usize) -> Vec<i64> {
    let mut elems: Vec<usize> = (0..n).collect();
    elems.shuffle(rng);
    let mut table = vec![0i64; 1 << n];
    let mut i = 0;
    while i < n {
        let len = rng.random_range(1..=3.min(n - i));
        let group = elems[i..i + len].iter().fold(0u64, |m, &e| m | bit(e));
        i += len;
        match rng.random_range(0..3) {
            0 => {}
            1 => {
                for (s, v) in table.iter_mut().enumerate() {
                    if is_subset(group, s as u64) {
                        *v += 1;
                    }
                }
            }
            _ => {
                let k = rng.random_range(0..len) as i64;
                for (s, v) in table.iter_mut().enumerate() {
                    *v += (count(s as u64 & group) as i64 - k).max(0);
                }
            }
        }
    }
    table
}

fn covers(pair: &ContraPolymatroidPair, set: u64) -> bool {
    pair.covers(set)
}

/// Graphic matroid on a random graph with 4 or 5 nodes and at most 8 edges,
/// plus the nonempty edge stars of a random subset of its nodes.
fn random_degree_graph(rng: &mut impl Rng) -> Result<(MatroidOracle, Vec<u64>)> {
    let v = rng.random_range(4..=5);
    let mut all: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    all.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Keep a spanning tree first so the graph stays connected.
    for i in 1..v {
        edges.push((rng.random_range(0..i), i));
    }
    for e in all {
        if edges.len() >= 8 {
            break;
        }
        if !edges.contains(&e) && rng.random_bool(0.7) {
            edges.push(e);
        }
    }
    edges.shuffle(rng);
    let stars = loop {
        let chosen: Vec<usize> = (0..v).filter(|_| rng.random_bool(0.6)).collect();
        if !chosen.is_empty() {
            break chosen;
        }
    };
    let stars = stars
        .into_iter()
        .map(|u| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == u || b == u)
                .fold(0u64, |s, (i, _)| s | bit(i))
        })
        .collect();
    Ok((MatroidOracle::graphic(v, &edges)?, stars))
}

fn random_side_sets(rng: &mut impl Rng, n: usize, max_sets: usize, max_delta: usize) -> Vec<u64> {
    loop {
        let k = rng.random_range(1..=max_sets);
        let sets: Vec<u64> = (0..k)
            .map(|_| loop {
                let s = (0..n).filter(|_| rng.random_bool(0.5)).fold(0u64, |m, v| m | bit(v));
                if s != 0 {
                    break s;
                }
            })
            .collect();
        let cs: Vec<CrossingConstraint> = sets.iter().map(|&s| CrossingConstraint::upper(s, Rational::zero())).collect();
        if max_frequency(&cs, n) <= max_delta {
            return sets;
        }
    }
}

/// Random pair of certified-supermodular functions on 5..=10 elements
/// with upper bounds at or one below the loads of a random minimal cover.
/// Draws whose relaxation is infeasible are rejected.
pub fn random_intersection(rng: &mut impl Rng) -> Result<IntersectionInstance> {
    loop {
        let inst = draw_intersection(rng)?;
        match intersection_lp_optimum(&inst) {
            Ok(_) => return Ok(inst),
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

fn draw_intersection(rng: &mut impl Rng) -> Result<IntersectionInstance> {
    let n = rng.random_range(5..=10);
    let pair = ContraPolymatroidPair::new(n, random_supermodular(rng, n), random_supermodular(rng, n))?;
    let mut cover = full(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for e in order {
        if covers(&pair, cover & !bit(e)) {
            cover &= !bit(e);
        }
    }
    let costs = (0..n).map(|_| Rational::from(rng.random_range(1..=10i64))).collect();
    let constraints = random_side_sets(rng, n, 4, 3)
        .into_iter()
        .map(|s| {
            let load = count(s & cover) as i64;
            CrossingConstraint::upper(s, Rational::from((load - rng.random_range(0..=1)).max(0)))
        })
        .collect();
    IntersectionInstance::new(pair, costs, constraints)
}

fn random_matroid(rng: &mut impl Rng) -> Result<MatroidOracle> {
    match rng.random_range(0..3) {
        0 => {
            let v = rng.random_range(3..=5);
            let m = rng.random_range(v..=8);
            let mut edges = Vec::new();
            for i in 1..v {
                edges.push((rng.random_range(0..i), i));
            }
            while edges.len() < m {
                let a = rng.random_range(0..v);
                let b = rng.random_range(0..v);
                if a != b {
                    edges.push((a, b));
                }
            }
            edges.shuffle(rng);
            MatroidOracle::graphic(v, &edges)
        }
        1 => {
            let n = rng.random_range(4..=8);
            MatroidOracle::uniform(rng.random_range(1..n), n)
        }
        _ => {
            let n = rng.random_range(4..=8);
            let mut blocks = Vec::new();
            let mut i = 0;
            while i < n {
                let len = rng.random_range(1..=3.min(n - i));
                let mask = (i..i + len).fold(0u64, |m, e| m | bit(e));
                blocks.push((mask, rng.random_range(1..=len)));
                i += len;
            }
            MatroidOracle::partition(n, &blocks)
        }
    }
}

fn random_basis(rng: &mut impl Rng, m: &MatroidOracle) -> u64 {
    let mut order: Vec<usize> = (0..m.n()).collect();
    order.shuffle(rng);
    let mut b = 0u64;
    for e in order {
        if m.rank(b | bit(e)) > m.rank(b) {
            b |= bit(e);
        }
    }
    b
}

/// Random matroid lattice on at most 8 elements with side constraints
/// within one of the loads of a random basis. The general variant gets
/// two-sided bounds with frequency at most 2; the inclusion variant gets
/// upper bounds only, and disjoint sets when `unit_delta` is set. Draws
/// whose relaxation is infeasible are rejected.
pub fn random_lattice(rng: &mut impl Rng, variant: LatticeVariant, unit_delta: bool) -> Result<LatticeInstance> {
    loop {
        let inst = draw_lattice(rng, variant, unit_delta)?;
        let lp = LatticeLp {
            inst: &inst,
            undecided: full(inst.n()),
            fixed: 0,
            active: (0..inst.constraints.len()).collect(),
        };
        match solve_to_extreme_point(&lp) {
            Ok(_) => return Ok(inst),
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

fn draw_lattice(rng: &mut impl Rng, variant: LatticeVariant, unit_delta: bool) -> Result<LatticeInstance> {
    let degree_style = !unit_delta && rng.random_bool(0.4);
    let (m, stars) = if degree_style {
        let (m, stars) = random_degree_graph(rng)?;
        (m, Some(stars))
    } else {
        (random_matroid(rng)?, None)
    };
    let n = m.n();
    let basis = random_basis(rng, &m);
    let costs = (0..n).map(|_| Rational::from(rng.random_range(1..=10i64))).collect();
    let sets = if let Some(stars) = stars {
        stars
    } else if unit_delta {
        let mut elems: Vec<usize> = (0..n).collect();
        elems.shuffle(rng);
        let k = rng.random_range(1..=3);
        elems.chunks(n.div_ceil(k)).map(|c| c.iter().fold(0u64, |s, &e| s | bit(e))).collect()
    } else {
        random_side_sets(rng, n, 4, 2)
    };
    let constraints = sets
        .into_iter()
        .map(|s| {
            let load = count(s & basis) as i64;
            match variant {
                LatticeVariant::General => {
                    let lower = load + rng.random_range(-1..=1);
                    let upper = (load + rng.random_range(-1..=1)).max(lower);
                    CrossingConstraint {
                        elements: s,
                        lower: Some(Rational::from(lower.max(0))),
                        upper: Some(Rational::from(upper.max(0))),
                    }
                }
                LatticeVariant::Inclusion => {
                    CrossingConstraint::upper(s, Rational::from((load - rng.random_range(0..=1)).max(0)))
                }
            }
        })
        .collect();
    LatticeInstance::new(matroid_to_lattice(&m)?, costs, constraints, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::setfn::supermodular_witness_pairs;

    #[test]
    fn mcst_instances_are_valid() {
        for i in 0..30 {
            let inst = random_mcst(&mut rng_for(1, i)).unwrap();
            let n = inst.graph.n();
            assert!((5..=10).contains(&n));
            assert!(inst.graph.is_connected_with(0..inst.graph.m()));
            assert!(inst.family.len() < 2 * n);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_mcst(&mut rng_for(3, 5)).unwrap();
        let b = random_mcst(&mut rng_for(3, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn intersection_functions_are_supermodular() {
        for i in 0..20 {
            let inst = random_intersection(&mut rng_for(2, i)).unwrap();
            let (r1, r2) = inst.pair.tables();
            assert_eq!(supermodular_witness_pairs(inst.n(), r1), None);
            assert_eq!(supermodular_witness_pairs(inst.n(), r2), None);
            assert!(inst.delta() <= 3);
        }
    }

    #[test]
    fn lattice_instances_have_feasible_basis() {
        for i in 0..20 {
            let inst = random_lattice(&mut rng_for(4, i), LatticeVariant::General, false).unwrap();
            assert!(inst.delta() <= 2);
            let inc = random_lattice(&mut rng_for(5, i), LatticeVariant::Inclusion, true).unwrap();
            assert!(inc.delta() <= 1);
        }
    }
}
