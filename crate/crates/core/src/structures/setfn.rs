//! Exhaustive axiom checks for set functions given as tables over `2^n`.

use crate::bits::{bit, full};

/// Largest ground set for table-based set functions.
pub const MAX_GROUND: usize = 16;

/// Checks `f(A) + f(B) <= f(A & B) + f(A | B)` through the equivalent local
/// condition `f(S+a) + f(S+b) <= f(S) + f(S+a+b)`. Returns a violating
/// pair on failure.
pub fn supermodular_witness(n: usize, f: &[i64]) -> Option<(u64, u64)> {
    local_witness(n, f, |lhs, rhs| lhs <= rhs)
}

/// Same as [`supermodular_witness`] with the inequality reversed.
pub fn submodular_witness(n: usize, f: &[i64]) -> Option<(u64, u64)> {
    local_witness(n, f, |lhs, rhs| lhs >= rhs)
}

fn local_witness(n: usize, f: &[i64], ok: impl Fn(i64, i64) -> bool) -> Option<(u64, u64)> {
    for s in 0..=full(n) {
        for a in 0..n {
            if s & bit(a) != 0 {
                continue;
            }
            for b in a + 1..n {
                if s & bit(b) != 0 {
                    continue;
                }
                let (sa, sb) = (s | bit(a), s | bit(b));
                let lhs = f[sa as usize] + f[sb as usize];
                let rhs = f[s as usize] + f[(sa | sb) as usize];
                if !ok(lhs, rhs) {
                    return Some((sa, sb));
                }
            }
        }
    }
    None
}

/// Pairwise supermodularity over all `4^n` pairs. Used as a test oracle.
pub fn supermodular_witness_pairs(n: usize, f: &[i64]) -> Option<(u64, u64)> {
    for a in 0..=full(n) {
        for b in 0..=full(n) {
            if f[a as usize] + f[b as usize] > f[(a & b) as usize] + f[(a | b) as usize] {
                return Some((a, b));
            }
        }
    }
    None
}

/// First pair `S ⊂ S+e` with `f(S) > f(S+e)`.
pub fn monotone_witness(n: usize, f: &[i64]) -> Option<(u64, u64)> {
    for s in 0..=full(n) {
        for e in 0..n {
            if s & bit(e) == 0 && f[s as usize] > f[(s | bit(e)) as usize] {
                return Some((s, s | bit(e)));
            }
        }
    }
    None
}

pub fn check_table(n: usize, f: &[i64], what: &str) -> Result<(), String> {
    if n > MAX_GROUND {
        return Err(format!("{what}: ground set of {n} exceeds {MAX_GROUND}"));
    }
    if f.len() != 1usize << n {
        return Err(format!("{what}: table has {} entries, expected 2^{n}", f.len()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(n: usize, g: impl Fn(u64) -> i64) -> Vec<i64> {
        (0..=full(n)).map(g).collect()
    }

    #[test]
    fn convex_of_size_is_supermodular() {
        let f = table(4, |s| {
            let k = s.count_ones() as i64;
            k * k
        });
        assert_eq!(supermodular_witness(4, &f), None);
        assert!(submodular_witness(4, &f).is_some());
    }

    #[test]
    fn concave_of_size_is_not() {
        let f = table(3, |s| (s.count_ones() as i64).min(1));
        assert!(supermodular_witness(3, &f).is_some());
        assert_eq!(submodular_witness(3, &f), None);
        assert_eq!(monotone_witness(3, &f), None);
    }

    proptest! {
        // The local test agrees with the pairwise definition.
        #[test]
        fn local_matches_pairs(vals in proptest::collection::vec(-3i64..4, 16)) {
            let local = supermodular_witness(4, &vals).is_none();
            let pairs = supermodular_witness_pairs(4, &vals).is_none();
            prop_assert_eq!(local, pairs);
        }
    }
}
