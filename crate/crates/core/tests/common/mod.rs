//! Shared corpus generators for the integration suites. Everything is
//! seeded, so failures reproduce byte for byte.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random bytes drawn from the first `alpha` symbols. Alphabets up
/// to 26 map onto lowercase letters; larger ones use the raw byte range.
pub fn random_text(rng: &mut ChaCha8Rng, len: usize, alpha: usize) -> Vec<u8> {
    (0..len).map(|_| pick(rng, alpha)).collect()
}

fn pick(rng: &mut ChaCha8Rng, alpha: usize) -> u8 {
    let v = rng.random_range(0..alpha) as u8;
    if alpha <= 26 {
        b'a' + v
    } else {
        v
    }
}

/// A length drawn log-uniformly from `lo..=hi`, so short and long inputs
/// are equally represented across orders of magnitude.
pub fn log_uniform_len(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let x = rng.random_range(a..=b).exp();
    (x as usize).clamp(lo, hi)
}

/// Highly repetitive text: a seed block concatenated with light point
/// mutations (and occasional drift of the block itself) until `target`
/// bytes accumulate.
pub fn repetitive_text(rng: &mut ChaCha8Rng, target: usize, alpha: usize) -> Vec<u8> {
    let block_len = rng.random_range(32..=96).min(target.max(32));
    let mut block = random_text(rng, block_len, alpha);
    let mut text = block.clone();
    while text.len() < target {
        let mut copy = block.clone();
        for _ in 0..rng.random_range(0..=3u32) {
            if copy.len() < 8 {
                break;
            }
            let i = rng.random_range(0..copy.len());
            match rng.random_range(0..3u32) {
                0 => copy[i] = pick(rng, alpha),
                1 => copy.insert(i, pick(rng, alpha)),
                _ => {
                    copy.remove(i);
                }
            }
        }
        if rng.random_range(0..4u32) == 0 {
            block = copy.clone();
        }
        text.extend_from_slice(&copy);
    }
    text.truncate(target);
    text
}

/// Like [`repetitive_text`] but with far rarer mutations, for the
/// megabyte-scale checks where the parse must stay strongly compressible.
pub fn very_repetitive_text(rng: &mut ChaCha8Rng, target: usize, alpha: usize) -> Vec<u8> {
    let block_len = rng.random_range(48..=96);
    let mut block = random_text(rng, block_len, alpha);
    let mut text = block.clone();
    while text.len() < target {
        let mut copy = block.clone();
        if rng.random_range(0..8u32) == 0 {
            let i = rng.random_range(0..copy.len());
            copy[i] = pick(rng, alpha);
            if rng.random_range(0..4u32) == 0 {
                block = copy.clone();
            }
        }
        text.extend_from_slice(&copy);
    }
    text.truncate(target);
    text
}

/// A query for `text`: an extracted substring, optionally disturbed by a
/// few substitutions so distances spread across the tau bands.
pub fn substring_query(
    rng: &mut ChaCha8Rng,
    text: &[u8],
    q_len: usize,
    mutations: usize,
) -> Vec<u8> {
    assert!(text.len() >= q_len);
    let start = rng.random_range(0..=text.len() - q_len);
    let mut q = text[start..start + q_len].to_vec();
    for _ in 0..mutations {
        let i = rng.random_range(0..q.len());
        q[i] = q[i].wrapping_add(rng.random_range(1..5) as u8);
    }
    q
}
