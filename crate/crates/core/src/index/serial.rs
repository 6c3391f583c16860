//! Binary index format.
//!
//! Layout, all integers little-endian:
//! magic `SIEDM001`, then u64 sigma, u64 n, u64 rounds, u64 text length,
//! u32 root id, (rounds+1) u64 round boundaries, a 256-bit terminal bitmap,
//! the left-child encoding (u64 bit length, packed bytes), the right-child
//! array (u64 count, u32 ids), n u64 expansion lengths, the storage flag
//! bitmap (u64 bit length, packed bytes), one block per stored vector
//! (u32 pair count, then sorted u32 symbol / u32 frequency pairs), and a
//! trailing CRC-32 over everything before it.

use super::charvec::CharVec;
use super::EspIndex;
use crate::succinct::BitVec;
use crate::{Error, Result};

pub(crate) const MAGIC: &[u8; 8] = b"SIEDM001";

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).ok_or(Error::Truncated {
            needed: usize::MAX,
        })?;
        if end > self.buf.len() {
            return Err(Error::Truncated { needed: end });
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

fn push_bitvec(out: &mut Vec<u8>, bv: &BitVec) {
    out.extend_from_slice(&(bv.len() as u64).to_le_bytes());
    out.extend_from_slice(&bv.to_raw_bytes());
}

fn read_bitvec(r: &mut Reader<'_>) -> Result<BitVec> {
    let bits = r.u64()?;
    let bits = usize::try_from(bits).map_err(|_| Error::format("bit length too large"))?;
    let bytes = r.take(bits.div_ceil(8))?;
    if bits % 8 != 0 {
        let pad = bytes[bytes.len() - 1] >> (bits % 8);
        if pad != 0 {
            return Err(Error::format("nonzero padding bits in bit payload"));
        }
    }
    BitVec::from_raw_bytes(bytes, bits)
}

pub(crate) fn serialize(idx: &EspIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(idx.sigma() as u64).to_le_bytes());
    out.extend_from_slice(&(idx.n() as u64).to_le_bytes());
    out.extend_from_slice(&(idx.rounds() as u64).to_le_bytes());
    out.extend_from_slice(&idx.text_len().to_le_bytes());
    out.extend_from_slice(&idx.root().0.to_le_bytes());
    for &b in idx.round_bounds() {
        out.extend_from_slice(&(b as u64).to_le_bytes());
    }

    let mut bitmap = [0u8; 32];
    for &b in idx.terminal_bytes() {
        bitmap[(b / 8) as usize] |= 1 << (b % 8);
    }
    out.extend_from_slice(&bitmap);

    push_bitvec(&mut out, idx.a_l());

    out.extend_from_slice(&(idx.n() as u64).to_le_bytes());
    for i in 0..idx.n() as usize {
        let right = idx.a_r().access(i).expect("index within bounds") as u32;
        out.extend_from_slice(&right.to_le_bytes());
    }

    for &len in idx.lens() {
        out.extend_from_slice(&len.to_le_bytes());
    }

    push_bitvec(&mut out, idx.fb());

    for cv in idx.cv_store() {
        out.extend_from_slice(&(cv.pairs().len() as u32).to_le_bytes());
        for &(sym, freq) in cv.pairs() {
            out.extend_from_slice(&sym.to_le_bytes());
            out.extend_from_slice(&freq.to_le_bytes());
        }
    }

    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Serialized byte sizes of (tree encoding, characteristic vectors, length
/// table). The tree encoding covers the round boundaries plus both child
/// sequences; the vector component covers the flag bitmap and the store.
pub(crate) fn component_sizes(idx: &EspIndex) -> (usize, usize, usize) {
    let n = idx.n() as usize;
    let tree = (idx.round_bounds().len()) * 8 + (8 + idx.a_l().len().div_ceil(8)) + (8 + 4 * n);
    let vectors = (8 + idx.fb().len().div_ceil(8))
        + idx
            .cv_store()
            .iter()
            .map(|cv| 4 + 8 * cv.pairs().len())
            .sum::<usize>();
    let lens = 8 * n;
    (tree, vectors, lens)
}

pub(crate) fn deserialize(bytes: &[u8]) -> Result<EspIndex> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r.take(8)?;
    if magic != MAGIC {
        return Err(Error::format("bad magic; not an index file"));
    }

    let sigma = r.u64()?;
    if sigma == 0 || sigma > 256 {
        return Err(Error::format("terminal count out of range"));
    }
    let sigma = sigma as u32;
    let n = r.u64()?;
    if n == 0 || n > (u32::MAX - sigma) as u64 {
        return Err(Error::format("variable count out of range"));
    }
    let n = n as u32;
    let rounds = r.u64()?;
    if rounds == 0 || rounds > n as u64 {
        return Err(Error::format("round count out of range"));
    }
    let text_len = r.u64()?;
    let root = r.u32()?;

    let mut round_bounds = Vec::with_capacity(rounds as usize + 1);
    for _ in 0..=rounds {
        let b = r.u64()?;
        if b > (sigma + n) as u64 {
            return Err(Error::format("round boundary out of range"));
        }
        round_bounds.push(b as u32);
    }

    let bitmap = r.take(32)?;
    let mut terminal_bytes = Vec::with_capacity(sigma as usize);
    for b in 0..=255u8 {
        if bitmap[(b / 8) as usize] >> (b % 8) & 1 == 1 {
            terminal_bytes.push(b);
        }
    }
    if terminal_bytes.len() != sigma as usize {
        return Err(Error::format("terminal bitmap does not match sigma"));
    }

    let a_l = read_bitvec(&mut r)?;

    let a_r_count = r.u64()?;
    if a_r_count != n as u64 {
        return Err(Error::format("right child count does not match n"));
    }
    let raw = r.take(4 * n as usize)?;
    let rights: Vec<u64> = raw
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as u64)
        .collect();

    let raw = r.take(8 * n as usize)?;
    let lens: Vec<u64> = raw
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();

    let fb = read_bitvec(&mut r)?;
    if fb.len() != n as usize {
        return Err(Error::format("storage flag bitmap length does not match n"));
    }

    let stored = fb.count_ones();
    let mut cv_store = Vec::with_capacity(stored);
    for _ in 0..stored {
        let count = r.u32()? as usize;
        let raw = r.take(8 * count)?;
        let pairs: Vec<(u32, u32)> = raw
            .chunks_exact(8)
            .map(|c| {
                (
                    u32::from_le_bytes(c[0..4].try_into().unwrap()),
                    u32::from_le_bytes(c[4..8].try_into().unwrap()),
                )
            })
            .collect();
        cv_store.push(CharVec::from_pairs(pairs)?);
    }

    let crc_stored = r.u32()?;
    if r.remaining() != 0 {
        return Err(Error::format("trailing bytes after checksum"));
    }
    let crc_computed = crc32fast::hash(&bytes[..bytes.len() - 4]);
    if crc_stored != crc_computed {
        return Err(Error::Checksum {
            stored: crc_stored,
            computed: crc_computed,
        });
    }

    EspIndex::from_parts(
        sigma,
        text_len,
        root,
        round_bounds,
        terminal_bytes,
        a_l,
        rights,
        lens,
        fb,
        cv_store,
    )
}
