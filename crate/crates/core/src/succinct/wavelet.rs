//! Wavelet matrix: rank/select/access over an integer sequence with a large
//! alphabet, built on the bitvector from this module.
//!
//! One bitvector per bit of the alphabet width; level 0 holds the most
//! significant bit and each level below is the stable zeros-then-ones
//! reordering of the one above. All three queries walk the levels, so they
//! cost one rank or select per bit of the alphabet.

use crate::error::Error;
use crate::succinct::BitVec;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    bits: BitVec,
    zeros: usize,
}

/// Immutable integer sequence with rank (inclusive), select (1-based rank,
/// 0-based position) and access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSeq {
    len: usize,
    max_sym: u64,
    levels: Vec<Level>,
}

impl IntSeq {
    pub fn new(values: &[u64]) -> Self {
        let max_sym = values.iter().copied().max().unwrap_or(0);
        let width = (64 - max_sym.leading_zeros()).max(1);
        let mut levels = Vec::with_capacity(width as usize);
        let mut cur = values.to_vec();
        for lvl in 0..width {
            let shift = width - 1 - lvl;
            let bits = BitVec::from_bits(cur.iter().map(|v| v >> shift & 1 == 1));
            let mut zeros = Vec::with_capacity(cur.len());
            let mut ones = Vec::with_capacity(cur.len());
            for &v in &cur {
                if v >> shift & 1 == 1 {
                    ones.push(v);
                } else {
                    zeros.push(v);
                }
            }
            let z = zeros.len();
            zeros.extend_from_slice(&ones);
            cur = zeros;
            levels.push(Level { bits, zeros: z });
        }
        IntSeq {
            len: values.len(),
            max_sym,
            levels,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Largest value stored at construction time.
    pub fn max_symbol(&self) -> u64 {
        self.max_sym
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        if i >= self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        let mut pos = i;
        let mut value = 0u64;
        for level in &self.levels {
            value <<= 1;
            if level.bits.get(pos)? {
                value |= 1;
                pos = level.zeros + level.bits.rank1_prefix(pos);
            } else {
                pos = level.bits.rank0_prefix(pos);
            }
        }
        Ok(value)
    }

    /// Occurrences of `v` in positions `0..=i`.
    pub fn rank(&self, v: u64, i: usize) -> Result<usize> {
        if i >= self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        if v > self.max_sym {
            return Ok(0);
        }
        let width = self.levels.len() as u32;
        let mut s = 0usize;
        let mut e = i + 1;
        for (lvl, level) in self.levels.iter().enumerate() {
            let bit = v >> (width - 1 - lvl as u32) & 1;
            if bit == 1 {
                s = level.zeros + level.bits.rank1_prefix(s);
                e = level.zeros + level.bits.rank1_prefix(e);
            } else {
                s = level.bits.rank0_prefix(s);
                e = level.bits.rank0_prefix(e);
            }
        }
        Ok(e - s)
    }

    /// 0-based position of the `k`-th occurrence of `v`, `k` counted from 1.
    pub fn select(&self, v: u64, k: usize) -> Result<usize> {
        let available = if self.len == 0 {
            0
        } else {
            self.rank(v, self.len - 1)?
        };
        if k == 0 || k > available {
            return Err(Error::SelectNotFound {
                symbol: v,
                rank: k,
                available,
            });
        }
        let width = self.levels.len() as u32;
        // Walk down to the start of v's bucket in the virtual bottom level.
        let mut s = 0usize;
        for (lvl, level) in self.levels.iter().enumerate() {
            let bit = v >> (width - 1 - lvl as u32) & 1;
            if bit == 1 {
                s = level.zeros + level.bits.rank1_prefix(s);
            } else {
                s = level.bits.rank0_prefix(s);
            }
        }
        // Walk the k-th slot of the bucket back up to a real position.
        let mut pos = s + (k - 1);
        for (lvl, level) in self.levels.iter().enumerate().rev() {
            let bit = v >> (width - 1 - lvl as u32) & 1;
            pos = if bit == 1 {
                level.bits.select1(pos - level.zeros + 1)?
            } else {
                level.bits.select0(pos + 1)?
            };
        }
        Ok(pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sequence() {
        let s = IntSeq::new(&[2, 0, 2, 1]);
        assert_eq!(s.rank(2, 3).unwrap(), 2);
        assert_eq!(s.select(2, 2).unwrap(), 2);
        assert_eq!(s.access(0).unwrap(), 2);
        assert_eq!(s.access(1).unwrap(), 0);
        assert_eq!(s.access(3).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let s = IntSeq::new(&[2, 0, 2, 1]);
        assert!(matches!(s.access(4), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.rank(0, 9), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            s.select(1, 2),
            Err(Error::SelectNotFound { available: 1, .. })
        ));
        assert!(matches!(s.select(7, 1), Err(Error::SelectNotFound { .. })));
    }

    #[test]
    fn agrees_with_linear_scan_over_large_alphabet() {
        // Pseudo-random values over an alphabet of ten thousand symbols.
        let mut state = 0xDEADBEEFu64;
        let mut step = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let values: Vec<u64> = (0..2000).map(|_| step() % 10_000).collect();
        let s = IntSeq::new(&values);
        for (i, &v) in values.iter().enumerate() {
            assert_eq!(s.access(i).unwrap(), v);
        }
        // Spot-check rank/select for a handful of symbols over every prefix.
        for &probe in &[values[0], values[1], values[77], 9_999] {
            let mut count = 0;
            for (i, &v) in values.iter().enumerate() {
                if v == probe {
                    count += 1;
                    assert_eq!(s.select(probe, count).unwrap(), i);
                }
                assert_eq!(s.rank(probe, i).unwrap(), count);
            }
        }
    }

    #[test]
    fn single_symbol_alphabet() {
        let s = IntSeq::new(&[0, 0, 0]);
        assert_eq!(s.rank(0, 2).unwrap(), 3);
        assert_eq!(s.select(0, 3).unwrap(), 2);
        assert_eq!(s.access(1).unwrap(), 0);
    }
}
