use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of `{0, .., n-1}` as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: Self = Self(0);

    pub fn full(n: usize) -> Self {
        Self(full_mask(n))
    }

    pub fn singleton(i: usize) -> Self {
        Self(1 << i)
    }

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        Self(idx.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn bits(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        Self(!self.0 & full_mask(n))
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl From<u32> for SubsetMask {
    fn from(m: u32) -> Self {
        Self(m)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Submasks of `mask`, including the empty set and `mask` itself.
pub(crate) fn submasks(mask: usize) -> impl Iterator<Item = usize> {
    let mut s = Some(mask);
    std::iter::from_fn(move || {
        let cur = s?;
        s = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Spread the low bits of `compact` onto the set bits of `mask`.
pub(crate) fn deposit(compact: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        if compact >> k & 1 == 1 {
            out |= bit;
        }
        m &= m - 1;
        k += 1;
    }
    out
}

/// Gather the bits of `full` at the set positions of `mask` into the low bits.
pub(crate) fn extract(full: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        if full & bit != 0 {
            out |= 1 << k;
        }
        m &= m - 1;
        k += 1;
    }
    out
}
