//! Sparse characteristic vectors: symbol frequencies over a parse subtree.

use crate::{Error, Result};

/// Frequency vector of every symbol occurring in a parse subtree, kept as
/// (symbol, count) pairs sorted by symbol. For a variable X the vector is
/// F(left) + F(right) + one count of X itself; for a terminal it is a unit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharVec {
    pairs: Vec<(u32, u32)>,
}

impl CharVec {
    pub fn new() -> Self {
        CharVec { pairs: Vec::new() }
    }

    pub fn unit(sym: u32) -> Self {
        CharVec {
            pairs: vec![(sym, 1)],
        }
    }

    /// Wraps pre-sorted pairs, validating strict symbol order and positive
    /// counts (the serialized form must be canonical).
    pub fn from_pairs(pairs: Vec<(u32, u32)>) -> Result<Self> {
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::format("characteristic vector symbols not ascending"));
            }
        }
        if pairs.iter().any(|&(_, c)| c == 0) {
            return Err(Error::format("characteristic vector holds a zero count"));
        }
        Ok(CharVec { pairs })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn support_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn get(&self, sym: u32) -> u32 {
        match self.pairs.binary_search_by_key(&sym, |p| p.0) {
            Ok(i) => self.pairs[i].1,
            Err(_) => 0,
        }
    }

    /// Adds `k` to one symbol's count.
    pub fn add(&mut self, sym: u32, k: u32) {
        match self.pairs.binary_search_by_key(&sym, |p| p.0) {
            Ok(i) => self.pairs[i].1 += k,
            Err(i) => self.pairs.insert(i, (sym, k)),
        }
    }

    /// Pointwise sum.
    pub fn merge(&self, other: &CharVec) -> CharVec {
        let mut out = Vec::with_capacity(self.pairs.len() + other.pairs.len());
        let (mut i, mut j) = (0, 0);
        while i < self.pairs.len() && j < other.pairs.len() {
            let (sa, ca) = self.pairs[i];
            let (sb, cb) = other.pairs[j];
            match sa.cmp(&sb) {
                std::cmp::Ordering::Less => {
                    out.push((sa, ca));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((sb, cb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((sa, ca + cb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.pairs[i..]);
        out.extend_from_slice(&other.pairs[j..]);
        CharVec { pairs: out }
    }

    /// L1 distance: sum of absolute count differences over all symbols.
    pub fn l1_distance(&self, other: &CharVec) -> u64 {
        let mut sum = 0u64;
        let (mut i, mut j) = (0, 0);
        while i < self.pairs.len() && j < other.pairs.len() {
            let (sa, ca) = self.pairs[i];
            let (sb, cb) = other.pairs[j];
            match sa.cmp(&sb) {
                std::cmp::Ordering::Less => {
                    sum += ca as u64;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    sum += cb as u64;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    sum += (ca as i64 - cb as i64).unsigned_abs();
                    i += 1;
                    j += 1;
                }
            }
        }
        sum += self.pairs[i..].iter().map(|&(_, c)| c as u64).sum::<u64>();
        sum += other.pairs[j..].iter().map(|&(_, c)| c as u64).sum::<u64>();
        sum
    }

    /// Total mass: the number of nodes in the subtree the vector describes.
    pub fn total(&self) -> u64 {
        self.pairs.iter().map(|&(_, c)| c as u64).sum()
    }
}
