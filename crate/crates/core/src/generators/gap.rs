//! Integrality-gap constructions for general MCST and for crossing lattice
//! polyhedra, each with an exhaustively computed report.

use serde::{Deserialize, Serialize};

use crate::bits::{bit, count, full};
use crate::error::{Error, Result};
use crate::lp::{separate_lattice, spanning_tree_membership_by_blocks};
use crate::numeric::Rational;
use crate::oracles::{brute_mcst, for_each_spanning_tree, EdgeBoundSet, EdgeOrder};
use crate::structures::{
    CrossingConstraint, EdgeBound, GeneralMcstInstance, Graph, LatticeInstance, LatticeOracle, LatticeVariant,
};

/// Outcome of a gap construction. `integral_min_violation` is the smallest
/// achievable maximum additive bound violation over all integral solutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub construction: String,
    pub lp_point: Vec<Rational>,
    pub lp_feasible: bool,
    pub integral_min_violation: Rational,
    /// The same minimum, recomputed with the enumeration order reversed.
    pub reverse_min_violation: Rational,
    /// Violation every integral solution must reach.
    pub required_violation: Rational,
    /// An integral solution attaining the minimum.
    pub witness: Vec<usize>,
    pub enumerated: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<i64>,
    pub failures: Vec<String>,
}

impl GapReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn finish(mut self) -> Self {
        if !self.lp_feasible {
            self.failures.push("fractional point is not LP-feasible".into());
        }
        if self.integral_min_violation != self.reverse_min_violation {
            self.failures.push(format!(
                "forward minimum {} differs from reversed minimum {}",
                self.integral_min_violation, self.reverse_min_violation
            ));
        }
        if self.integral_min_violation < self.required_violation {
            self.failures.push(format!(
                "some integral solution violates by only {} < {}",
                self.integral_min_violation, self.required_violation
            ));
        }
        self
    }
}

/// Vertex layout shared with the reduction gadget: root `0`, then `u_i`,
/// `w_i`, `v_i` at `1 + 3i`, `2 + 3i`, `3 + 3i`.
pub fn gadget_graph(e: usize) -> Result<Graph> {
    let mut g = Graph::new(3 * e + 1)?;
    for i in 0..e {
        let (u, w, v) = (1 + 3 * i, 2 + 3 * i, 3 + 3 * i);
        g.add_edge(0, u, Rational::zero())?;
        g.add_edge(u, v, Rational::zero())?;
        g.add_edge(0, w, Rational::zero())?;
        g.add_edge(w, v, Rational::zero())?;
    }
    Ok(g)
}

/// Edge ids `(r,u_i), (u_i,v_i), (r,w_i), (w_i,v_i)` of gadget `i`.
pub fn gadget_edges(i: usize) -> [usize; 4] {
    [4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3]
}

/// `δ(u_i)` over `i ∈ c`.
pub fn u_star(c: u64) -> Vec<usize> {
    crate::bits::bits(c).flat_map(|i| [4 * i, 4 * i + 1]).collect()
}

/// `δ(w_i)` over `i ∈ c`.
pub fn w_star(c: u64) -> Vec<usize> {
    crate::bits::bits(c).flat_map(|i| [4 * i + 2, 4 * i + 3]).collect()
}

/// Subset `X` of a gadget tree: `i ∈ X` iff both edges of `δ(u_i)` are used.
/// `None` unless every gadget uses exactly three of its four edges.
pub fn tree_subset(e: usize, tree: &[usize]) -> Option<u64> {
    let mut used = vec![0usize; e];
    let mut in_tree = vec![false; 4 * e];
    for &t in tree {
        used[t / 4] += 1;
        in_tree[t] = true;
    }
    if used.iter().any(|&c| c != 3) {
        return None;
    }
    Some((0..e).filter(|&i| in_tree[4 * i] && in_tree[4 * i + 1]).fold(0, |x, i| x | bit(i)))
}

/// A tree realising subset `X`: both `u`-edges for `i ∈ X`, both `w`-edges
/// otherwise, with the root edge on the other side.
pub fn subset_tree(e: usize, x: u64) -> Vec<usize> {
    let mut t: Vec<usize> = (0..e)
        .flat_map(|i| {
            if x & bit(i) != 0 {
                [4 * i, 4 * i + 1, 4 * i + 2]
            } else {
                [4 * i + 2, 4 * i + 3, 4 * i]
            }
        })
        .collect();
    t.sort_unstable();
    t
}

/// Sylvester-Hadamard rows of order `e`: `S_j` holds the positions of `+1`
/// in row `j`, i.e. all `i` with `|i & j|` even.
pub fn hadamard_sets(e: usize) -> Vec<u64> {
    (0..e)
        .map(|j| (0..e).filter(|&i| (i & j).count_ones() % 2 == 0).fold(0u64, |s, i| s | bit(i)))
        .collect()
}

fn imbalance(sets: &[u64], x: u64) -> i64 {
    sets.iter()
        .map(|&s| (2 * count(s & x) as i64 - count(s) as i64).abs())
        .max()
        .unwrap_or(0)
}

/// `min_X max_j ||X ∩ S_j| - |X̄ ∩ S_j||` by brute force; returns the value
/// and the first minimising `X` in the scan order.
pub fn discrepancy(e: usize, sets: &[u64], reverse: bool) -> Result<(i64, u64)> {
    if e > 20 {
        return Err(Error::Guard(format!("discrepancy over 2^{e} colourings")));
    }
    let all = full(e);
    let mut best: Option<(i64, u64)> = None;
    let mut visit = |x: u64| {
        let d = imbalance(sets, x);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, x));
        }
    };
    if reverse {
        (0..=all).rev().for_each(&mut visit);
    } else {
        (0..=all).for_each(&mut visit);
    }
    Ok(best.expect("at least the empty colouring"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McstGap {
    pub instance: GeneralMcstInstance,
    pub sets: Vec<u64>,
    pub report: GapReport,
}

/// Largest gadget count whose trees are enumerated one by one; above it the
/// minimum is taken over subsets `X` through the tree correspondence.
pub const MCST_GAP_TREE_LIMIT: usize = 8;

/// Gadget graph with bounds `|S_j| + ⌈|S_j|/2⌉` on `U_j` and `W_j`.
pub fn gen_mcst_gap(e: usize) -> Result<McstGap> {
    if !e.is_power_of_two() || e < 4 {
        return Err(Error::Instance(format!("gap size {e} must be 4, 8 or 16")));
    }
    if e > 16 {
        return Err(Error::Guard(format!("gap size {e} exceeds 16")));
    }
    let graph = gadget_graph(e)?;
    let sets = hadamard_sets(e);
    let bound_of = |s: u64| Rational::from(count(s) + count(s).div_ceil(2));
    let mut bounds = Vec::new();
    for (j, &s) in sets.iter().enumerate() {
        bounds.push(EdgeBound {
            label: format!("U{j}"),
            edges: u_star(s),
            bound: bound_of(s),
        });
        bounds.push(EdgeBound {
            label: format!("W{j}"),
            edges: w_star(s),
            bound: bound_of(s),
        });
    }
    let instance = GeneralMcstInstance::new(graph, bounds)?;
    let graph = &instance.graph;

    let lp_point = vec![Rational::new(3, 4); graph.m()];
    let mut failures = Vec::new();
    let tree_ok = spanning_tree_membership_by_blocks(graph, &lp_point)?.is_feasible();
    let bounds_ok = instance.bounds.iter().all(|b| {
        let load: Rational = b.edges.iter().map(|&e| &lp_point[e]).sum();
        load <= b.bound
    });

    let (rho, _) = discrepancy(e, &sets, false)?;
    let (rho_rev, _) = discrepancy(e, &sets, true)?;
    if rho != rho_rev {
        failures.push(format!("discrepancy {rho} differs from reversed scan {rho_rev}"));
    }

    let violation_of = |x: u64| {
        sets.iter()
            .map(|&s| {
                let u = Rational::from(count(s) + count(s & x));
                let w = Rational::from(count(s) + count(s & !x));
                u.max(w) - bound_of(s)
            })
            .fold(Rational::zero(), Rational::max)
    };

    let (min_v, rev_v, witness, enumerated) = if e <= MCST_GAP_TREE_LIMIT {
        let bs = EdgeBoundSet::from_general(&instance);
        let fwd = brute_mcst(graph, &bs, EdgeOrder::Forward)?;
        let rev = brute_mcst(graph, &bs, EdgeOrder::Reverse)?;
        if fwd.tree_count != 4u64.pow(e as u32) {
            failures.push(format!("{} trees, expected 4^{e}", fwd.tree_count));
        }
        let mut bad = 0u64;
        for_each_spanning_tree(graph, EdgeOrder::Forward, |t| {
            let Some(x) = tree_subset(e, t) else {
                bad += 1;
                return;
            };
            let load = |edges: Vec<usize>| edges.iter().filter(|e| t.contains(e)).count();
            let loads_match = sets
                .iter()
                .all(|&s| load(u_star(s)) == count(s) + count(s & x) && load(w_star(s)) == count(s) + count(s & !x));
            if !loads_match || instance.max_violation(t) != violation_of(x) {
                bad += 1;
            }
        })?;
        if bad > 0 {
            failures.push(format!("{bad} trees break the subset correspondence"));
        }
        (fwd.min_max_violation, rev.min_max_violation, fwd.min_violation_tree, fwd.tree_count)
    } else {
        let all = full(e);
        let scan = |it: &mut dyn Iterator<Item = u64>| {
            let mut best: Option<(Rational, u64)> = None;
            for x in it {
                let v = violation_of(x);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, x));
                }
            }
            best.expect("nonempty scan")
        };
        let (fv, fx) = scan(&mut (0..=all));
        let (rv, _) = scan(&mut (0..=all).rev());
        let t = subset_tree(e, fx);
        if !graph.is_spanning_tree(&t) || instance.max_violation(&t) != fv {
            failures.push("witness tree does not realise its subset".into());
        }
        (fv, rv, t, all + 1)
    };

    let report = GapReport {
        construction: format!("mcst-gap e={e}"),
        lp_point,
        lp_feasible: tree_ok && bounds_ok,
        integral_min_violation: min_v,
        reverse_min_violation: rev_v,
        required_violation: Rational::new(rho, 2) - Rational::one(),
        witness,
        enumerated,
        discrepancy: Some(rho),
        failures,
    }
    .finish();
    Ok(McstGap {
        instance,
        sets,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarGap {
    pub k: usize,
    pub instance: LatticeInstance,
    pub report: GapReport,
}

/// Edge ids `(v_i, u_{i,j})` and `(u_{i,j}, v_{i+1})` for segment `i`
/// (0-based) and parallel path `j`.
pub fn planar_edges(k: usize, i: usize, j: usize) -> [usize; 2] {
    let base = 2 * (i * k + j);
    [base, base + 1]
}

/// `E_i`: all edges of segment `i`.
pub fn planar_segment(k: usize, i: usize) -> u64 {
    (0..k).flat_map(|j| planar_edges(k, i, j)).fold(0, |s, e| s | bit(e))
}

/// The s-t path lattice: member `p = Σ p_i k^i` takes parallel path `p_i` in
/// segment `i`. Paths are ordered by lying below one another, which is the
/// componentwise order; meet and join are componentwise min and max.
pub fn planar_path_lattice(k: usize) -> Result<LatticeOracle> {
    let members = k.pow(k as u32);
    let digits = |p: usize| -> Vec<usize> { (0..k).map(|i| p / k.pow(i as u32) % k).collect() };
    let encode = |d: &[usize]| -> usize { d.iter().enumerate().map(|(i, &j)| j * k.pow(i as u32)).sum() };
    let all: Vec<Vec<usize>> = (0..members).map(digits).collect();
    let rho = all
        .iter()
        .map(|d| {
            d.iter()
                .enumerate()
                .flat_map(|(i, &j)| planar_edges(k, i, j))
                .fold(0u64, |s, e| s | bit(e))
        })
        .collect();
    let combine = |f: fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
        (0..members)
            .map(|a| {
                (0..members)
                    .map(|b| encode(&all[a].iter().zip(&all[b]).map(|(&x, &y)| f(x, y)).collect::<Vec<_>>()))
                    .collect()
            })
            .collect()
    };
    let meet = combine(usize::min);
    let join = combine(usize::max);
    LatticeOracle::explicit(2 * k * k, rho, vec![1; members], meet, join)
}

/// Planar min-cut gap instance with `b_i = 1` on every segment.
pub fn gen_planar_mincut_gap(k: usize) -> Result<PlanarGap> {
    if !(2..=4).contains(&k) {
        return Err(if k > 4 {
            Error::Guard(format!("planar gap with k = {k} exceeds 4"))
        } else {
            Error::Instance(format!("planar gap needs k >= 2, got {k}"))
        });
    }
    let lattice = planar_path_lattice(k)?;
    let n = 2 * k * k;
    let constraints = (0..k)
        .map(|i| CrossingConstraint::upper(planar_segment(k, i), Rational::one()))
        .collect();
    let instance = LatticeInstance::new(lattice, vec![Rational::one(); n], constraints, LatticeVariant::General)?;

    let lp_point = vec![Rational::new(1, 2 * k as i64); n];
    let ranks_ok = separate_lattice(&instance.lattice, full(n), 0, &lp_point).is_feasible();
    let bounds_ok = instance.constraints.iter().all(|c| {
        let load: Rational = crate::bits::bits(c.elements).map(|e| &lp_point[e]).sum();
        c.upper.as_ref().is_none_or(|b| load <= *b)
    });

    let mut failures = Vec::new();
    let (fwd, rev, witness, enumerated) = planar_min_violation(k, &instance, n <= PLANAR_FLAT_LIMIT, &mut failures)?;
    let report = GapReport {
        construction: format!("planar-gap k={k}"),
        lp_point,
        lp_feasible: ranks_ok && bounds_ok,
        integral_min_violation: fwd,
        reverse_min_violation: rev,
        required_violation: Rational::from(k - 1),
        witness,
        enumerated,
        discrepancy: None,
        failures,
    }
    .finish();
    Ok(PlanarGap { k, instance, report })
}

/// Largest ground set searched as one flat subset scan.
pub const PLANAR_FLAT_LIMIT: usize = 18;

fn violation(inst: &LatticeInstance, set: u64) -> Rational {
    inst.constraints
        .iter()
        .filter_map(|c| c.upper.as_ref().map(|b| Rational::from(count(c.elements & set)) - b))
        .fold(Rational::zero(), Rational::max)
}

/// Minimum over hitting sets of the worst violation. Up to
/// [`PLANAR_FLAT_LIMIT`] edges every subset is scanned; beyond it the scan
/// runs per segment, since a set hits every path exactly when it blocks
/// all parallel paths of some segment and each bound sees one segment.
fn planar_min_violation(
    k: usize,
    inst: &LatticeInstance,
    flat: bool,
    failures: &mut Vec<String>,
) -> Result<(Rational, Rational, Vec<usize>, u64)> {
    let n = 2 * k * k;
    let hits = |set: u64| (0..inst.lattice.len()).all(|a| inst.lattice.rho(a) & set != 0);
    if flat {
        let all = full(n);
        let scan = |it: &mut dyn Iterator<Item = u64>| {
            let mut best: Option<(Rational, u64)> = None;
            for s in it {
                if !hits(s) {
                    continue;
                }
                let v = violation(inst, s);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, s));
                }
            }
            best
        };
        let (fv, fs) = scan(&mut (0..=all)).ok_or_else(|| Error::Invariant("no hitting set".into()))?;
        let (rv, _) = scan(&mut (0..=all).rev()).ok_or_else(|| Error::Invariant("no hitting set".into()))?;
        return Ok((fv, rv, crate::bits::to_indices(fs), all + 1));
    }
    // Per segment: the cheapest way to block it, scanned over its 2^(2k)
    // edge subsets in both orders.
    let seg_bits = 2 * k;
    let mut fwd: Option<(Rational, u64)> = None;
    let mut rev: Option<(Rational, u64)> = None;
    let mut enumerated = 0u64;
    for i in 0..k {
        let shift = 2 * k * i;
        let blocks = |local: u64| (0..k).all(|j| local >> (2 * j) & 0b11 != 0);
        let scan = |it: &mut dyn Iterator<Item = u64>| {
            let mut best: Option<(Rational, u64)> = None;
            for local in it {
                if !blocks(local) {
                    continue;
                }
                let set = local << shift;
                let v = violation(inst, set);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, set));
                }
            }
            best
        };
        let f = scan(&mut (0..=full(seg_bits))).expect("the full segment blocks");
        let r = scan(&mut (0..=full(seg_bits)).rev()).expect("the full segment blocks");
        enumerated += 1 << seg_bits;
        if !hits(f.1) {
            failures.push(format!("blocking set of segment {i} misses a path"));
        }
        if fwd.as_ref().is_none_or(|(b, _)| f.0 < *b) {
            fwd = Some(f);
        }
        if rev.as_ref().is_none_or(|(b, _)| r.0 < *b) {
            rev = Some(r);
        }
    }
    let (fv, fs) = fwd.expect("k >= 2");
    let (rv, _) = rev.expect("k >= 2");
    Ok((fv, rv, crate::bits::to_indices(fs), enumerated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::kirchhoff_count;

    #[test]
    fn hadamard_rows_are_balanced_except_the_first() {
        let s = hadamard_sets(4);
        assert_eq!(s, vec![0b1111, 0b0101, 0b0011, 0b1001]);
        assert_eq!(discrepancy(4, &s, false).unwrap().0, 2);
    }

    #[test]
    fn gadget_tree_count_matches_determinant() {
        let g = gadget_graph(2).unwrap();
        assert_eq!(kirchhoff_count(&g), Rational::from(16));
    }

    #[test]
    fn subset_round_trip() {
        for x in 0..8 {
            let t = subset_tree(3, x);
            assert!(gadget_graph(3).unwrap().is_spanning_tree(&t));
            assert_eq!(tree_subset(3, &t), Some(x));
        }
    }

    #[test]
    fn mcst_gap_e4() {
        let gap = gen_mcst_gap(4).unwrap();
        let r = &gap.report;
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.lp_feasible);
        assert_eq!(r.discrepancy, Some(2));
        assert_eq!(r.enumerated, 256);
        assert_eq!(r.integral_min_violation, Rational::one());
    }

    #[test]
    fn mcst_gap_rejects_bad_sizes() {
        assert!(matches!(gen_mcst_gap(6), Err(Error::Instance(_))));
        assert!(matches!(gen_mcst_gap(32), Err(Error::Guard(_))));
    }

    #[test]
    fn planar_gap_k2() {
        let gap = gen_planar_mincut_gap(2).unwrap();
        let r = &gap.report;
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(gap.instance.lattice.len(), 4);
        assert_eq!(r.integral_min_violation, Rational::one());
        assert_eq!(r.enumerated, 256);
    }

    #[test]
    fn planar_segment_scan_matches_flat_scan() {
        for k in [2, 3] {
            let gap = gen_planar_mincut_gap(k).unwrap();
            let mut f = Vec::new();
            let flat = planar_min_violation(k, &gap.instance, true, &mut f).unwrap();
            let seg = planar_min_violation(k, &gap.instance, false, &mut f).unwrap();
            assert!(f.is_empty(), "{f:?}");
            assert_eq!((flat.0, flat.1), (seg.0, seg.1));
        }
    }

    #[test]
    fn planar_segment_loads_are_one() {
        let k = 3;
        for i in 0..k {
            assert_eq!(count(planar_segment(k, i)), 2 * k);
        }
    }
}
