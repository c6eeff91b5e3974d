//! Small helpers for `u64` bitsets.

/// Iterator over the set bits of a mask, lowest first.
#[derive(Clone, Copy)]
pub struct Bits(u64);

impl Iterator for Bits {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

pub fn bits(mask: u64) -> Bits {
    Bits(mask)
}

pub fn bit(i: usize) -> u64 {
    1u64 << i
}

pub fn count(mask: u64) -> usize {
    mask.count_ones() as usize
}

pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> u64 {
    it.into_iter().fold(0, |m, i| m | bit(i))
}

pub fn to_indices(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

/// Order on sets: smaller cardinality first, then lexicographic on the
/// sorted element lists.
pub fn set_order(a: u64, b: u64) -> std::cmp::Ordering {
    count(a).cmp(&count(b)).then_with(|| lex_order(a, b))
}

/// Lexicographic order of the sorted element lists of two sets of equal size.
pub fn lex_order(a: u64, b: u64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let low = diff & diff.wrapping_neg();
    if a & low != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}
