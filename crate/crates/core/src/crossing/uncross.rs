//! Uncrossing tight families into chains.

use crate::error::{Error, Result};
use crate::numeric::{Rational, RowSpace};

/// A lattice of members with tightness and incidence vectors fixed by the
/// current LP point.
pub trait ChainDomain {
    fn leq(&self, a: u64, b: u64) -> bool;
    fn meet(&self, a: u64, b: u64) -> u64;
    fn join(&self, a: u64, b: u64) -> u64;
    /// Incidence vector over the LP variables.
    fn vector(&self, a: u64) -> Vec<Rational>;
    fn is_tight(&self, a: u64) -> bool;
    fn width(&self) -> usize;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Ascending in the lattice order.
    pub members: Vec<u64>,
    /// Meet/join replacements performed.
    pub steps: usize,
}

const MAX_STEPS: usize = 100_000;

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Builds a chain of tight members whose vectors are independent and span
/// the vectors of `tight`. Each member not yet spanned is pushed towards
/// the chain by replacing it with its meet or join with the smallest
/// incomparable chain member, keeping whichever is outside the span.
pub fn uncross_chain(dom: &dyn ChainDomain, tight: &[u64]) -> Result<Chain> {
    let mut chain: Vec<u64> = Vec::new();
    let mut space = RowSpace::new(dom.width());
    let mut steps = 0;
    for &t0 in tight {
        if !dom.is_tight(t0) {
            return Err(Error::Invariant(format!("member {t0} handed to uncrossing is not tight")));
        }
    }
    loop {
        let mut grew = false;
        for &t0 in tight {
            if space.contains(&dom.vector(t0)) {
                continue;
            }
            let mut t = t0;
            loop {
                let mut candidates: Vec<u64> = chain.iter().copied().filter(|&s| !dom.leq(s, t) && !dom.leq(t, s)).collect();
                candidates.sort_unstable();
                let Some(&s) = candidates.first() else { break };
                let (m, j) = (dom.meet(t, s), dom.join(t, s));
                if !dom.is_tight(m) || !dom.is_tight(j) {
                    return Err(Error::Invariant(format!("meet or join of tight {t} and {s} is not tight")));
                }
                if add(&dom.vector(t), &dom.vector(s)) != add(&dom.vector(m), &dom.vector(j)) {
                    return Err(Error::Invariant(format!("uncrossing identity fails for {t} and {s}")));
                }
                t = if !space.contains(&dom.vector(m)) { m } else { j };
                if space.contains(&dom.vector(t)) {
                    return Err(Error::Invariant("both meet and join fell into the span".into()));
                }
                steps += 1;
                if steps > MAX_STEPS {
                    return Err(Error::Invariant("uncrossing did not terminate".into()));
                }
            }
            space.insert(&dom.vector(t));
            chain.push(t);
            grew = true;
        }
        if !grew {
            break;
        }
    }
    // Every pair is comparable, so sorting by the order is well defined.
    chain.sort_by(|&a, &b| {
        if a == b {
            std::cmp::Ordering::Equal
        } else if dom.leq(a, b) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    for w in chain.windows(2) {
        if !dom.leq(w[0], w[1]) {
            return Err(Error::Invariant("uncrossed family is not a chain".into()));
        }
    }
    Ok(Chain { members: chain, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{count, is_subset};

    /// Powerset of 3 elements, every set tight (x ≡ 1 with r = |S|).
    struct Cube;

    impl ChainDomain for Cube {
        fn leq(&self, a: u64, b: u64) -> bool {
            is_subset(a, b)
        }
        fn meet(&self, a: u64, b: u64) -> u64 {
            a & b
        }
        fn join(&self, a: u64, b: u64) -> u64 {
            a | b
        }
        fn vector(&self, a: u64) -> Vec<Rational> {
            (0..3).map(|e| Rational::from((a >> e & 1) as i64)).collect()
        }
        fn is_tight(&self, _: u64) -> bool {
            true
        }
        fn width(&self) -> usize {
            3
        }
    }

    #[test]
    fn singletons_become_a_chain() {
        let c = uncross_chain(&Cube, &[0b001, 0b010, 0b100]).unwrap();
        assert_eq!(c.members.len(), 3);
        for w in c.members.windows(2) {
            assert!(is_subset(w[0], w[1]) && count(w[1]) > count(w[0]));
        }
        assert!(c.steps > 0);
    }

    #[test]
    fn empty_input() {
        let c = uncross_chain(&Cube, &[]).unwrap();
        assert!(c.members.is_empty());
    }
}
