//! Bit-level building blocks: a rank/select bitvector, the gap+unary encoder
//! for monotone integer sequences, and a wavelet matrix for rank/select/access
//! over large alphabets.
//!
//! Rank here is inclusive (`rank1(i)` counts ones in positions `0..=i`) and
//! select takes 1-based occurrence ranks but returns 0-based positions, so
//! `select1(rank1(i))` round-trips onto the position of the last one at or
//! before `i`.

mod bitvec;
mod wavelet;

pub use bitvec::{decode_monotone, encode_monotone, BitVec, BitVecBuilder};
pub use wavelet::IntSeq;
