//! Plain bitvector with a two-level rank directory and binary-search select.
//!
//! Layout is little-endian throughout: bit `i` lives in word `i / 64` at bit
//! `i % 64`, which serializes as "bit 0 = least significant bit of byte 0".

use crate::error::Error;
use crate::Result;

/// Bits per rank superblock. Each superblock spans 8 words, so per-word
/// sub-counts fit in a `u16`.
const SB_BITS: usize = 512;
const SB_WORDS: usize = SB_BITS / 64;

/// Static bitvector supporting inclusive rank and 1-based select for both bit
/// values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
    /// Ones before each superblock; one extra entry holds the total.
    sb_ones: Vec<u64>,
    /// Ones within the enclosing superblock before each word.
    word_ones: Vec<u16>,
}

/// Incremental builder; push bits left to right, then `finish`.
#[derive(Debug, Default)]
pub struct BitVecBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVecBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        let word = self.len / 64;
        if word == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[word] |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Append `n` zero bits at once.
    pub fn push_zeros(&mut self, n: usize) {
        self.len += n;
        let need = self.len.div_ceil(64);
        self.words.resize(need, 0);
    }

    pub fn finish(self) -> BitVec {
        BitVec::from_raw_parts(self.words, self.len)
    }
}

impl BitVec {
    /// Build from an explicit bit sequence.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitVecBuilder::new();
        for bit in bits {
            b.push(bit);
        }
        b.finish()
    }

    /// Build from packed words holding `len` bits; unused tail bits are
    /// cleared so equal bit content always has equal raw bytes.
    pub fn from_raw_parts(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let n_sb = words.len().div_ceil(SB_WORDS);
        let mut sb_ones = Vec::with_capacity(n_sb + 1);
        let mut word_ones = Vec::with_capacity(words.len());
        let mut total = 0u64;
        sb_ones.push(0);
        for (w, word) in words.iter().enumerate() {
            if w % SB_WORDS == 0 && w > 0 {
                sb_ones.push(total);
            }
            word_ones.push((total - sb_ones[w / SB_WORDS]) as u16);
            total += word.count_ones() as u64;
        }
        sb_ones.push(total);
        BitVec {
            words,
            len,
            sb_ones,
            word_ones,
        }
    }

    /// Reconstruct from serialized little-endian bytes.
    pub fn from_raw_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::format(format!(
                "bit payload of {} bytes cannot hold {} bits",
                bytes.len(),
                len
            )));
        }
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << ((i % 8) * 8);
        }
        Ok(Self::from_raw_parts(words, len))
    }

    /// Serialized form: `ceil(len/8)` little-endian bytes.
    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push((self.words[i / 8] >> ((i % 8) * 8)) as u8);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        *self.sb_ones.last().unwrap() as usize
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    pub fn get(&self, i: usize) -> Result<bool> {
        if i >= self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.words[i / 64] >> (i % 64) & 1 == 1)
    }

    /// Ones strictly before position `i`; callers may pass `i = len`.
    pub(crate) fn rank1_prefix(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let word = i / 64;
        if word >= self.words.len() {
            return self.count_ones();
        }
        let mut r = self.sb_ones[word / SB_WORDS] as usize + self.word_ones[word] as usize;
        let rem = i % 64;
        if rem > 0 {
            r += (self.words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    pub(crate) fn rank0_prefix(&self, i: usize) -> usize {
        i - self.rank1_prefix(i)
    }

    /// Ones in positions `0..=i`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i >= self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.rank1_prefix(i + 1))
    }

    /// Zeros in positions `0..=i`.
    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i + 1 - self.rank1(i)?)
    }

    /// 0-based position of the `k`-th one, `k` counted from 1.
    pub fn select1(&self, k: usize) -> Result<usize> {
        let total = self.count_ones();
        if k == 0 || k > total {
            return Err(Error::SelectNotFound {
                symbol: 1,
                rank: k,
                available: total,
            });
        }
        let mut lo = 0usize;
        let mut hi = self.sb_ones.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if (self.sb_ones[mid] as usize) < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - self.sb_ones[lo] as usize;
        let w_start = lo * SB_WORDS;
        let w_end = (w_start + SB_WORDS).min(self.words.len());
        for w in w_start..w_end {
            let ones = self.words[w].count_ones() as usize;
            if remaining <= ones {
                return Ok(w * 64 + select_in_word(self.words[w], remaining));
            }
            remaining -= ones;
        }
        unreachable!("select1 directory out of sync")
    }

    /// 0-based position of the `k`-th zero, `k` counted from 1.
    pub fn select0(&self, k: usize) -> Result<usize> {
        let total = self.count_zeros();
        if k == 0 || k > total {
            return Err(Error::SelectNotFound {
                symbol: 0,
                rank: k,
                available: total,
            });
        }
        // Superblocks below the last are always complete, so their zero
        // counts derive directly from the ones directory.
        let zeros_before = |sb: usize| sb * SB_BITS - self.sb_ones[sb] as usize;
        let mut lo = 0usize;
        let mut hi = self.sb_ones.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if zeros_before(mid) < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - zeros_before(lo);
        let w_start = lo * SB_WORDS;
        let w_end = (w_start + SB_WORDS).min(self.words.len());
        for w in w_start..w_end {
            let word_bits = (self.len - w * 64).min(64);
            let zeros = word_bits - self.words[w].count_ones() as usize;
            if remaining <= zeros {
                return Ok(w * 64 + select_in_word(!self.words[w], remaining));
            }
            remaining -= zeros;
        }
        unreachable!("select0 directory out of sync")
    }
}

/// Position of the `k`-th set bit inside one word, `k` from 1.
fn select_in_word(mut word: u64, mut k: usize) -> usize {
    debug_assert!(k >= 1 && k <= word.count_ones() as usize);
    let mut pos = 0;
    let half = (word & 0xFFFF_FFFF).count_ones() as usize;
    if k > half {
        k -= half;
        word >>= 32;
        pos += 32;
    }
    let quarter = (word & 0xFFFF).count_ones() as usize;
    if k > quarter {
        k -= quarter;
        word >>= 16;
        pos += 16;
    }
    let byte = (word & 0xFF).count_ones() as usize;
    if k > byte {
        k -= byte;
        word >>= 8;
        pos += 8;
    }
    loop {
        if word & 1 == 1 {
            k -= 1;
            if k == 0 {
                return pos;
            }
        }
        word >>= 1;
        pos += 1;
    }
}

/// Gap+unary encoding of a non-decreasing positive sequence: each value is
/// written as (gap to predecessor) zeros followed by a one, so the sequence
/// (1,1,3,5,8) becomes 0110010010001. Decoding is rank/select arithmetic;
/// see [`decode_monotone`].
pub fn encode_monotone(xs: &[u64]) -> Result<BitVec> {
    if xs.is_empty() {
        return Err(Error::invariant("encode_monotone: empty sequence"));
    }
    if xs[0] == 0 {
        return Err(Error::invariant("encode_monotone: values must be >= 1"));
    }
    let mut b = BitVecBuilder::new();
    let mut prev = 0u64;
    for &x in xs {
        if x < prev {
            return Err(Error::invariant(format!(
                "encode_monotone: sequence decreases ({prev} then {x})"
            )));
        }
        b.push_zeros((x - prev) as usize);
        b.push(true);
        prev = x;
    }
    Ok(b.finish())
}

/// Recover the `k`-th encoded value (`k` from 1): the zeros at or before the
/// `k`-th one count exactly the cumulative gaps.
pub fn decode_monotone(bv: &BitVec, k: usize) -> Result<u64> {
    let pos = bv.select1(k)?;
    Ok(bv.rank0(pos)? as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn rank_on_reference_vector() {
        let b = BitVec::from_bits(bits_of("0110010010001"));
        assert_eq!(b.len(), 13);
        // Positions 0..=2 hold 0,1,1: one zero.
        assert_eq!(b.rank0(2).unwrap(), 1);
        assert_eq!(b.rank1(2).unwrap(), 2);
        assert_eq!(b.rank1(12).unwrap(), 5);
        assert_eq!(b.rank0(12).unwrap(), 8);
    }

    #[test]
    fn rank_all_zeros() {
        let b = BitVec::from_bits(vec![false; 5]);
        assert_eq!(b.rank1(4).unwrap(), 0);
        assert_eq!(b.rank0(4).unwrap(), 5);
    }

    #[test]
    fn rank_out_of_range() {
        let b = BitVec::from_bits(vec![true; 3]);
        assert!(matches!(b.rank1(3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn select_on_reference_vector() {
        let b = BitVec::from_bits(bits_of("0110010010001"));
        // Second one sits at 0-based position 2 (position 3 counting from 1).
        assert_eq!(b.select1(2).unwrap(), 2);
        assert_eq!(b.select1(5).unwrap(), 12);
        assert_eq!(b.select0(1).unwrap(), 0);
        assert_eq!(b.select0(8).unwrap(), 11);
        assert!(matches!(b.select1(6), Err(Error::SelectNotFound { .. })));
        assert!(matches!(b.select1(0), Err(Error::SelectNotFound { .. })));
    }

    #[test]
    fn select_first_one() {
        let b = BitVec::from_bits(bits_of("1"));
        assert_eq!(b.select1(1).unwrap(), 0);
    }

    #[test]
    fn rank_select_agree_with_linear_scan() {
        // Deterministic pseudo-random bits spanning several superblocks.
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut step = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let bits: Vec<bool> = (0..4096).map(|_| step() & 1 == 1).collect();
        let b = BitVec::from_bits(bits.iter().copied());
        let mut ones = 0;
        for (i, &bit) in bits.iter().enumerate() {
            if bit {
                ones += 1;
                assert_eq!(b.select1(ones).unwrap(), i);
            }
            assert_eq!(b.rank1(i).unwrap(), ones, "rank1 at {i}");
            assert_eq!(b.rank0(i).unwrap(), i + 1 - ones, "rank0 at {i}");
            assert_eq!(b.rank1(i).unwrap() + b.rank0(i).unwrap(), i + 1);
        }
        let zeros = b.count_zeros();
        let mut seen = 0;
        for (i, &bit) in bits.iter().enumerate() {
            if !bit {
                seen += 1;
                assert_eq!(b.select0(seen).unwrap(), i);
            }
        }
        assert_eq!(seen, zeros);
    }

    #[test]
    fn select_of_rank_is_identity_on_set_positions() {
        let bits = bits_of("0110010010001");
        let b = BitVec::from_bits(bits.iter().copied());
        for (i, &bit) in bits.iter().enumerate() {
            if bit {
                assert_eq!(b.select1(b.rank1(i).unwrap()).unwrap(), i);
            }
        }
    }

    #[test]
    fn monotone_reference_encoding() {
        let bv = encode_monotone(&[1, 1, 3, 5, 8]).unwrap();
        let want = bits_of("0110010010001");
        assert_eq!(bv.len(), want.len());
        for (i, &bit) in want.iter().enumerate() {
            assert_eq!(bv.get(i).unwrap(), bit, "bit {i}");
        }
        for (k, &x) in [1u64, 1, 3, 5, 8].iter().enumerate() {
            assert_eq!(decode_monotone(&bv, k + 1).unwrap(), x);
        }
    }

    #[test]
    fn monotone_single_value() {
        let bv = encode_monotone(&[1]).unwrap();
        assert_eq!(bv.len(), 2);
        assert!(!bv.get(0).unwrap());
        assert!(bv.get(1).unwrap());
        assert_eq!(decode_monotone(&bv, 1).unwrap(), 1);
    }

    #[test]
    fn monotone_size_is_count_plus_last() {
        let xs = [2u64, 2, 2, 7, 7, 40];
        let bv = encode_monotone(&xs).unwrap();
        assert_eq!(bv.len() as u64, xs.len() as u64 + xs[xs.len() - 1]);
    }

    #[test]
    fn monotone_rejects_bad_input() {
        assert!(encode_monotone(&[]).is_err());
        assert!(encode_monotone(&[0, 1]).is_err());
        assert!(encode_monotone(&[3, 2]).is_err());
    }

    #[test]
    fn raw_bytes_round_trip() {
        let bits = bits_of("0110010010001");
        let b = BitVec::from_bits(bits);
        let bytes = b.to_raw_bytes();
        assert_eq!(bytes.len(), 2);
        // Little-endian: first 8 bits 0110 0100 reversed per byte.
        assert_eq!(bytes[0], 0b0010_0110);
        assert_eq!(bytes[1], 0b0001_0001);
        let back = BitVec::from_raw_bytes(&bytes, 13).unwrap();
        assert_eq!(back, b);
    }
}
