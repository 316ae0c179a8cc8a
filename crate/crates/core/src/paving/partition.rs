use serde::{Deserialize, Serialize};

use crate::subset::{full_mask, SubsetMask};

use super::PavingError;

/// Ordered tuple of pairwise disjoint, possibly empty, parts covering `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    parts: Vec<SubsetMask>,
}

impl Partition {
    pub fn new(n: usize, parts: Vec<SubsetMask>) -> Result<Self, PavingError> {
        let mut seen = 0u32;
        for p in &parts {
            if p.0 & seen != 0 {
                return Err(PavingError::InvalidPartition(format!("part {p} overlaps an earlier part")));
            }
            seen |= p.0;
        }
        if seen != full_mask(n) {
            return Err(PavingError::InvalidPartition(format!("parts do not cover all {n} points")));
        }
        Ok(Self { n, parts })
    }

    /// `assignment[i]` is the part containing point `i`.
    pub fn from_assignment(n: usize, r: usize, assignment: &[usize]) -> Result<Self, PavingError> {
        if assignment.len() != n || assignment.iter().any(|&j| j >= r) {
            return Err(PavingError::InvalidPartition("assignment out of range".into()));
        }
        let mut parts = vec![SubsetMask::EMPTY; r];
        for (i, &j) in assignment.iter().enumerate() {
            parts[j].0 |= 1 << i;
        }
        Ok(Self { n, parts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[SubsetMask] {
        &self.parts
    }

    pub fn nonempty_parts(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.parts.iter().copied().filter(|p| !p.is_empty())
    }

    pub fn assignment(&self) -> Vec<usize> {
        let mut a = vec![0; self.n];
        for (j, p) in self.parts.iter().enumerate() {
            for i in p.iter() {
                a[i] = j;
            }
        }
        a
    }

    /// Parts as sorted index lists, empty parts dropped.
    pub fn to_index_lists(&self) -> Vec<Vec<usize>> {
        self.nonempty_parts().map(|p| p.indices()).collect()
    }
}

/// All ordered assignments of `n` points to `r` labelled parts, in lexicographic order.
pub fn ordered_assignments(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = if r == 0 && n > 0 { None } else { Some(vec![0; n]) };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let next = cur.as_mut().unwrap();
        let mut i = n;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < r {
                break;
            }
            next[i] = 0;
        }
        Some(out)
    })
}

/// Unordered set partitions of `[n]` into at most `max_blocks` blocks, as restricted
/// growth strings (block labels in order of first appearance).
pub fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    if max_blocks == 0 {
        return out;
    }
    let mut a = vec![0usize; n];
    fn rec(i: usize, used: usize, a: &mut Vec<usize>, max_blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == a.len() {
            out.push(a.clone());
            return;
        }
        let top = (used + 1).min(max_blocks);
        for b in 0..top {
            a[i] = b;
            rec(i + 1, used.max(b + 1), a, max_blocks, out);
        }
    }
    rec(1, 1, &mut a, max_blocks, &mut out);
    out
}

/// Number of set partitions of `[n]` into at most `k` blocks.
pub fn count_set_partitions(n: usize, k: usize) -> u128 {
    // Stirling numbers of the second kind, row by row
    let mut s = vec![0u128; k.min(n) + 1];
    s[0] = 1;
    for _ in 0..n {
        for j in (1..s.len()).rev() {
            s[j] = s[j].saturating_mul(j as u128).saturating_add(s[j - 1]);
        }
        s[0] = 0;
    }
    s.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_parts() {
        assert!(Partition::new(3, vec![SubsetMask(0b011), SubsetMask(0b100)]).is_ok());
        assert!(Partition::new(3, vec![SubsetMask(0b011), SubsetMask(0b110)]).is_err());
        assert!(Partition::new(3, vec![SubsetMask(0b011)]).is_err());
        let p = Partition::from_assignment(3, 2, &[1, 0, 1]).unwrap();
        assert_eq!(p.parts(), &[SubsetMask(0b010), SubsetMask(0b101)]);
        assert_eq!(p.assignment(), vec![1, 0, 1]);
    }

    #[test]
    fn enumerations_have_the_right_size() {
        assert_eq!(ordered_assignments(3, 2).count(), 8);
        assert_eq!(ordered_assignments(0, 2).count(), 1);
        assert_eq!(set_partitions(4, 4).len(), 15);
        assert_eq!(set_partitions(4, 2).len(), 8);
        assert_eq!(count_set_partitions(4, 4), 15);
        assert_eq!(count_set_partitions(5, 2), 16);
        assert_eq!(count_set_partitions(10, 10), 115_975);
    }
}
