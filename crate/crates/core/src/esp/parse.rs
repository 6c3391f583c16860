//! Segment classification and block formation for one parse round, plus the
//! driver that iterates rounds until a single root symbol remains.

use std::collections::HashMap;
use std::ops::Range;

use super::reduction::{alphabet_reduction, iterated_log, select_landmarks};
use super::{EspGrammar, Rule, SegmentType, SymbolId};
use crate::{Error, Result};

/// One classified stretch of a round's input sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub range: Range<usize>,
    pub kind: SegmentType,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PieceKind {
    Rep,
    Free,
}

/// Splits a round input into typed segments: maximal runs of one symbol
/// (length at least two) become type 1, the stretches between them become
/// type 2 when they reach `threshold` symbols and type 3 otherwise. A
/// length-1 stretch cannot stand alone, so it joins a neighboring run,
/// preferring the one on its left.
pub fn classify_segments(seq: &[SymbolId], threshold: usize) -> Vec<Segment> {
    let mut pieces: Vec<(PieceKind, Range<usize>)> = Vec::new();
    let mut cursor = 0;
    let mut i = 0;
    while i < seq.len() {
        let mut j = i + 1;
        while j < seq.len() && seq[j] == seq[i] {
            j += 1;
        }
        if j - i >= 2 {
            if cursor < i {
                pieces.push((PieceKind::Free, cursor..i));
            }
            pieces.push((PieceKind::Rep, i..j));
            cursor = j;
        }
        i = j;
    }
    if cursor < seq.len() {
        pieces.push((PieceKind::Free, cursor..seq.len()));
    }

    let mut segs: Vec<Segment> = Vec::with_capacity(pieces.len());
    // Start override for a run that absorbs the singleton on its left.
    let mut carry: Option<usize> = None;
    let count = pieces.len();
    for (idx, (kind, mut range)) in pieces.into_iter().enumerate() {
        if let Some(s) = carry.take() {
            range.start = s;
        }
        match kind {
            PieceKind::Rep => segs.push(Segment {
                range,
                kind: SegmentType::Type1,
            }),
            PieceKind::Free if range.len() == 1 => {
                let prev_is_run = matches!(
                    segs.last(),
                    Some(Segment {
                        kind: SegmentType::Type1,
                        ..
                    })
                );
                if prev_is_run {
                    segs.last_mut().unwrap().range.end += 1;
                } else if idx + 1 < count {
                    carry = Some(range.start);
                } else {
                    // Only possible when the whole input is one symbol; the
                    // parser never asks for that, but classify stays total.
                    segs.push(Segment {
                        range,
                        kind: SegmentType::Type3,
                    });
                }
            }
            PieceKind::Free => {
                let kind = if range.len() >= threshold {
                    SegmentType::Type2
                } else {
                    SegmentType::Type3
                };
                segs.push(Segment { range, kind });
            }
        }
    }
    segs
}

fn push_left_aligned(range: Range<usize>, blocks: &mut Vec<(usize, usize)>) {
    let mut s = range.start;
    let e = range.end;
    debug_assert!(e - s >= 2);
    loop {
        match e - s {
            2 => {
                blocks.push((s, s + 2));
                return;
            }
            3 => {
                blocks.push((s, s + 3));
                return;
            }
            _ => {
                blocks.push((s, s + 2));
                s += 2;
            }
        }
    }
}

/// Carves `[0, len)` into blocks of two or three positions such that every
/// landmark `p` starts a block holding `p` and `p + 1`. Runs between
/// landmark blocks parse left-aligned; a length-1 run joins the block on its
/// left when that block still has room, otherwise the one on its right, and
/// a trailing singleton behind a full block re-splits that block's three
/// positions plus the singleton into two pairs.
fn landmark_blocks(len: usize, marks: &[usize]) -> Vec<(usize, usize)> {
    debug_assert!(!marks.is_empty());
    debug_assert!(marks.windows(2).all(|w| w[0] + 1 < w[1]));
    debug_assert!(*marks.last().unwrap() + 1 < len);

    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut cursor = 0;
    for &p in marks {
        let mut block = (p, p + 2);
        match p - cursor {
            0 => {}
            1 => {
                let appended = match blocks.last_mut() {
                    Some(last) if last.1 - last.0 == 2 => {
                        last.1 += 1;
                        true
                    }
                    _ => false,
                };
                if !appended {
                    block = (p - 1, p + 2);
                }
            }
            _ => push_left_aligned(cursor..p, &mut blocks),
        }
        blocks.push(block);
        cursor = p + 2;
    }
    match len - cursor {
        0 => {}
        1 => {
            let last = blocks.last_mut().expect("marks are not empty");
            if last.1 - last.0 == 2 {
                last.1 += 1;
            } else {
                let (s, e) = *last;
                debug_assert_eq!(e - s, 3);
                *last = (s, s + 2);
                blocks.push((s + 2, e + 1));
            }
        }
        _ => push_left_aligned(cursor..len, &mut blocks),
    }

    debug_assert_eq!(blocks.first().map(|b| b.0), Some(0));
    debug_assert_eq!(blocks.last().map(|b| b.1), Some(len));
    debug_assert!(blocks.windows(2).all(|w| w[0].1 == w[1].0));
    debug_assert!(blocks.iter().all(|b| (2..=3).contains(&(b.1 - b.0))));
    blocks
}

fn emit_block<F>(block: &[SymbolId], resolve: &mut F, out: &mut Vec<SymbolId>)
where
    F: FnMut(SymbolId, SymbolId, bool) -> SymbolId,
{
    match *block {
        [a, b] => out.push(resolve(a, b, false)),
        [a, b, c] => {
            let x = resolve(b, c, true);
            out.push(resolve(a, x, false));
        }
        _ => unreachable!("blocks have two or three symbols"),
    }
}

fn emit_left_aligned<F>(seg: &[SymbolId], resolve: &mut F, out: &mut Vec<SymbolId>)
where
    F: FnMut(SymbolId, SymbolId, bool) -> SymbolId,
{
    let mut blocks = Vec::with_capacity(seg.len() / 2 + 1);
    push_left_aligned(0..seg.len(), &mut blocks);
    for (s, e) in blocks {
        emit_block(&seg[s..e], resolve, out);
    }
}

fn parse_type2<F>(seg: &[SymbolId], resolve: &mut F, out: &mut Vec<SymbolId>) -> Result<()>
where
    F: FnMut(SymbolId, SymbolId, bool) -> SymbolId,
{
    let ids: Vec<u64> = seg.iter().map(|s| s.0 as u64).collect();
    let red = alphabet_reduction(&ids)?;
    let lms = select_landmarks(&red.labels)?;
    // A landmark blocks together with its right neighbor, so one sitting
    // on the final position cannot anchor a block.
    let marks: Vec<usize> = lms
        .iter()
        .map(|&i| i + red.offset)
        .filter(|&p| p + 1 < seg.len())
        .collect();
    if marks.is_empty() {
        emit_left_aligned(seg, resolve, out);
        return Ok(());
    }
    for (s, e) in landmark_blocks(seg.len(), &marks) {
        emit_block(&seg[s..e], resolve, out);
    }
    Ok(())
}

/// Parses one round input (at least two symbols) into its block symbols.
/// Every block is named through `resolve(left, right, is_trigram_lower)`;
/// a trigram resolves its lower pair first, then the top above it.
pub(crate) fn parse_round_with<F>(
    seq: &[SymbolId],
    threshold: usize,
    resolve: &mut F,
) -> Result<Vec<SymbolId>>
where
    F: FnMut(SymbolId, SymbolId, bool) -> SymbolId,
{
    if seq.len() < 2 {
        return Err(Error::invariant("a parse round needs at least two symbols"));
    }
    let mut out = Vec::with_capacity(seq.len() / 2 + 1);
    for seg in classify_segments(seq, threshold) {
        let s = &seq[seg.range.clone()];
        match seg.kind {
            SegmentType::Type1 | SegmentType::Type3 => emit_left_aligned(s, resolve, &mut out),
            SegmentType::Type2 => parse_type2(s, resolve, &mut out)?,
        }
    }
    debug_assert!(out.len() <= seq.len() / 2);
    debug_assert!(out.len() >= seq.len().div_ceil(3));
    Ok(out)
}

/// Incremental grammar construction shared by all rounds of one parse.
/// Identical blocks map to one variable through the block dictionary; the
/// keys never collide across rounds because a block's children always come
/// from the round directly below it.
pub struct EspBuilder {
    sigma: u32,
    threshold: usize,
    dict: HashMap<u64, u32>,
    rules: Vec<Rule>,
    lens: Vec<u64>,
    round_bounds: Vec<u32>,
    round_input_lens: Vec<u64>,
}

impl EspBuilder {
    /// `input_len` is the length of the original text; it fixes the type 2
    /// length threshold (twice the iterated logarithm) for every round.
    pub fn new(sigma: u32, input_len: usize) -> Self {
        EspBuilder {
            sigma,
            threshold: 2 * iterated_log(input_len.max(1) as u64) as usize,
            dict: HashMap::new(),
            rules: Vec::new(),
            lens: Vec::new(),
            round_bounds: vec![sigma],
            round_input_lens: Vec::new(),
        }
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    fn len_of(&self, id: SymbolId) -> u64 {
        if id.0 < self.sigma {
            1
        } else {
            self.lens[(id.0 - self.sigma) as usize]
        }
    }

    fn get_or_insert(&mut self, left: SymbolId, right: SymbolId, intermediate: bool) -> SymbolId {
        let key = ((left.0 as u64) << 32) | right.0 as u64;
        if let Some(&id) = self.dict.get(&key) {
            return SymbolId(id);
        }
        let id = self.sigma + self.rules.len() as u32;
        let len = self.len_of(left) + self.len_of(right);
        self.rules.push(Rule {
            left,
            right,
            is_intermediate: intermediate,
        });
        self.lens.push(len);
        self.dict.insert(key, id);
        SymbolId(id)
    }

    /// Parses one round input (at least two symbols) into its block
    /// variables, recording new rules as needed.
    pub fn parse_round(&mut self, seq: &[SymbolId]) -> Result<Vec<SymbolId>> {
        self.round_input_lens.push(seq.len() as u64);
        let threshold = self.threshold;
        let out = parse_round_with(seq, threshold, &mut |l, r, im| self.get_or_insert(l, r, im))?;
        self.round_bounds.push(self.sigma + self.rules.len() as u32);
        Ok(out)
    }

    pub fn finish(self, root: SymbolId, terminal_bytes: Vec<u8>) -> EspGrammar {
        debug_assert_eq!(terminal_bytes.len(), self.sigma as usize);
        EspGrammar {
            sigma: self.sigma,
            rules: self.rules,
            lens: self.lens,
            round_bounds: self.round_bounds,
            root,
            terminal_bytes,
            round_input_lens: self.round_input_lens,
        }
    }
}

/// Parses a text into its complete grammar by iterating rounds until one
/// symbol remains. Requires at least two bytes of input.
pub fn build_esp_tree(text: &[u8]) -> Result<EspGrammar> {
    if text.len() < 2 {
        return Err(Error::TextTooShort(text.len()));
    }
    let mut present = [false; 256];
    for &b in text {
        present[b as usize] = true;
    }
    let terminal_bytes: Vec<u8> = (0..=255u16)
        .map(|b| b as u8)
        .filter(|&b| present[b as usize])
        .collect();
    let mut map = [0u32; 256];
    for (i, &b) in terminal_bytes.iter().enumerate() {
        map[b as usize] = i as u32;
    }

    let mut builder = EspBuilder::new(terminal_bytes.len() as u32, text.len());
    let mut seq: Vec<SymbolId> = text.iter().map(|&b| SymbolId(map[b as usize])).collect();
    while seq.len() > 1 {
        seq = builder.parse_round(&seq)?;
    }
    Ok(builder.finish(seq[0], terminal_bytes))
}
