//! The succinct index over a parsed text: a monotone left-child encoding, a
//! wavelet-matrix right-child sequence, expansion lengths, and a partially
//! materialized store of characteristic vectors.

mod charvec;
mod rename;
mod serial;

pub use charvec::CharVec;
pub use rename::sorted_rename;

use crate::esp::{build_esp_tree, EspGrammar, SymbolId};
use crate::succinct::{decode_monotone, encode_monotone, BitVec, BitVecBuilder, IntSeq};
use crate::{Error, Result};

/// Immutable queryable index. Variable ids are those of the renamed
/// grammar: terminals `0..sigma`, then variables grouped by round with
/// ascending left children inside each round.
pub struct EspIndex {
    sigma: u32,
    n: u32,
    text_len: u64,
    root: u32,
    round_bounds: Vec<u32>,
    terminal_bytes: Vec<u8>,
    byte_to_terminal: [u32; 256],
    a_l: BitVec,
    a_l_zeros: usize,
    a_r: IntSeq,
    lens: Vec<u64>,
    fb: BitVec,
    cv_store: Vec<CharVec>,
}

impl EspIndex {
    /// Parses, renames, and encodes a text in one step.
    pub fn build(text: &[u8]) -> Result<EspIndex> {
        let g = sorted_rename(&build_esp_tree(text)?);
        EspIndex::from_grammar(&g)
    }

    /// Encodes an already renamed grammar. Fails if the grammar's rule
    /// array is not sorted by left child (apply [`sorted_rename`] first).
    pub fn from_grammar(g: &EspGrammar) -> Result<EspIndex> {
        if g.rules.is_empty() {
            return Err(Error::invariant("grammar has no variables"));
        }
        let lefts: Vec<u64> = g.rules.iter().map(|r| r.left.0 as u64 + 1).collect();
        let a_l = encode_monotone(&lefts)?;
        let rights: Vec<u64> = g.rules.iter().map(|r| r.right.0 as u64).collect();

        let mut fbb = BitVecBuilder::new();
        for i in 0..g.rules.len() {
            let id = SymbolId(g.sigma + i as u32);
            fbb.push(stores_vector(g.round_of(id), id.0, g.root.0));
        }
        let fb = fbb.finish();

        let cv_store = build_vector_store(g, &fb)?;

        EspIndex::from_parts(
            g.sigma,
            g.text_len(),
            g.root.0,
            g.round_bounds.clone(),
            g.terminal_bytes.clone(),
            a_l,
            rights,
            g.lens.clone(),
            fb,
            cv_store,
        )
    }

    /// Assembles an index from its stored components, deriving the lookup
    /// tables and validating structural invariants. Shared by construction
    /// and deserialization.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        sigma: u32,
        text_len: u64,
        root: u32,
        round_bounds: Vec<u32>,
        terminal_bytes: Vec<u8>,
        a_l: BitVec,
        rights: Vec<u64>,
        lens: Vec<u64>,
        fb: BitVec,
        cv_store: Vec<CharVec>,
    ) -> Result<EspIndex> {
        let n = rights.len() as u32;
        let mut byte_to_terminal = [u32::MAX; 256];
        for (i, &b) in terminal_bytes.iter().enumerate() {
            byte_to_terminal[b as usize] = i as u32;
        }
        let a_l_zeros = if a_l.is_empty() {
            0
        } else {
            a_l.rank0(a_l.len() - 1)?
        };
        let idx = EspIndex {
            sigma,
            n,
            text_len,
            root,
            round_bounds,
            terminal_bytes,
            byte_to_terminal,
            a_l,
            a_l_zeros,
            a_r: IntSeq::new(&rights),
            lens,
            fb,
            cv_store,
        };
        idx.validate_structure().map_err(|e| match e {
            Error::Format(_) => e,
            other => Error::format(format!("structural validation failed: {other}")),
        })?;
        Ok(idx)
    }

    fn validate_structure(&self) -> Result<()> {
        let sigma = self.sigma;
        let n = self.n;
        if n == 0 {
            return Err(Error::format("index holds no variables"));
        }
        if self.terminal_bytes.len() != sigma as usize {
            return Err(Error::format("terminal bitmap does not match sigma"));
        }
        let bounds = &self.round_bounds;
        if bounds.first() != Some(&sigma) || bounds.last() != Some(&(sigma + n)) {
            return Err(Error::format("round boundaries do not span the variables"));
        }
        if bounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::format("round boundaries not ascending"));
        }
        if self.root < sigma || self.root >= sigma + n {
            return Err(Error::format("root id out of range"));
        }
        if self.lens.len() != n as usize || self.fb.len() != n as usize {
            return Err(Error::format("per-variable table sizes disagree"));
        }
        if self.a_r.max_symbol() >= (sigma + n) as u64 {
            return Err(Error::format("right child id out of range"));
        }

        let mut stored_seen = 0usize;
        for i in 0..n {
            let v = SymbolId(sigma + i);
            let r = self.round_of(v);
            let (l, rt) = self.children(v)?;
            if l.0 >= sigma + n {
                return Err(Error::format("left child id out of range"));
            }
            if self.round_of(l) + 1 != r {
                return Err(Error::format("left child not one round below"));
            }
            let rr = self.round_of(rt);
            if rr + 1 != r {
                if rr != r {
                    return Err(Error::format("right child from a later round"));
                }
                // A same-round right child is a trigram's lower node; both
                // of its own children must come from the round below, which
                // bounds vector reconstruction depth.
                let (il, ir) = self.children(rt)?;
                if self.round_of(il) + 1 != r || self.round_of(ir) + 1 != r {
                    return Err(Error::format("nested same-round right children"));
                }
            }
            if self.lens[i as usize] != self.len_of(l) + self.len_of(rt) {
                return Err(Error::format("length table inconsistent with children"));
            }
            let should_store = stores_vector(r, v.0, self.root);
            if self.fb.get(i as usize)? != should_store {
                return Err(Error::format("vector storage flags not canonical"));
            }
            if should_store {
                stored_seen += 1;
            }
        }
        if stored_seen != self.cv_store.len() {
            return Err(Error::format("stored vector count mismatch"));
        }
        for (k, cv) in self.cv_store.iter().enumerate() {
            if cv.pairs().iter().any(|&(s, _)| s >= sigma + n) {
                return Err(Error::format("stored vector references unknown symbol"));
            }
            // A subtree over len leaves has exactly 2*len - 1 nodes.
            let v = self.stored_owner(k)?;
            if cv.total() != 2 * self.len_of(v) - 1 {
                return Err(Error::format("stored vector mass inconsistent"));
            }
        }
        Ok(())
    }

    /// The variable whose vector sits at store slot `k`.
    fn stored_owner(&self, k: usize) -> Result<SymbolId> {
        let pos = self.fb.select1(k + 1)?;
        Ok(SymbolId(self.sigma + pos as u32))
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// Number of variables.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn text_len(&self) -> u64 {
        self.text_len
    }

    pub fn root(&self) -> SymbolId {
        SymbolId(self.root)
    }

    pub fn rounds(&self) -> usize {
        self.round_bounds.len() - 1
    }

    pub fn round_bounds(&self) -> &[u32] {
        &self.round_bounds
    }

    pub fn terminal_bytes(&self) -> &[u8] {
        &self.terminal_bytes
    }

    pub fn is_terminal(&self, v: SymbolId) -> bool {
        v.0 < self.sigma
    }

    pub fn terminal_for_byte(&self, b: u8) -> Option<SymbolId> {
        match self.byte_to_terminal[b as usize] {
            u32::MAX => None,
            t => Some(SymbolId(t)),
        }
    }

    pub fn byte_for_terminal(&self, v: SymbolId) -> Option<u8> {
        self.terminal_bytes.get(v.index()).copied()
    }

    /// Total symbol count (terminals plus variables); valid ids are below.
    pub fn symbol_count(&self) -> u32 {
        self.sigma + self.n
    }

    pub fn stored_vector_count(&self) -> usize {
        self.cv_store.len()
    }

    fn check_variable(&self, v: SymbolId) -> Result<u32> {
        if v.0 < self.sigma || v.0 >= self.sigma + self.n {
            return Err(Error::OutOfRange {
                index: v.0 as usize,
                len: (self.sigma + self.n) as usize,
            });
        }
        Ok(v.0 - self.sigma)
    }

    fn check_symbol(&self, v: SymbolId) -> Result<()> {
        if v.0 >= self.sigma + self.n {
            return Err(Error::OutOfRange {
                index: v.0 as usize,
                len: (self.sigma + self.n) as usize,
            });
        }
        Ok(())
    }

    pub fn left_child(&self, v: SymbolId) -> Result<SymbolId> {
        let i = self.check_variable(v)?;
        let val = decode_monotone(&self.a_l, i as usize + 1)?;
        if val == 0 {
            return Err(Error::format("left child encoding decodes to zero"));
        }
        Ok(SymbolId(val as u32 - 1))
    }

    pub fn right_child(&self, v: SymbolId) -> Result<SymbolId> {
        let i = self.check_variable(v)?;
        Ok(SymbolId(self.a_r.access(i as usize)? as u32))
    }

    pub fn children(&self, v: SymbolId) -> Result<(SymbolId, SymbolId)> {
        Ok((self.left_child(v)?, self.right_child(v)?))
    }

    /// Expansion length; terminals expand to one byte. Panics on ids beyond
    /// the symbol range (a programming error, not an input condition).
    pub fn len_of(&self, v: SymbolId) -> u64 {
        if v.0 < self.sigma {
            1
        } else {
            self.lens[(v.0 - self.sigma) as usize]
        }
    }

    /// 1-based round that created the variable; terminals report 0.
    pub fn round_of(&self, v: SymbolId) -> usize {
        if v.0 < self.sigma {
            return 0;
        }
        self.round_bounds.partition_point(|&b| b <= v.0)
    }

    /// All variables whose left child is `v`, ascending. The monotone
    /// encoding keeps them contiguous: they are the ones inside one
    /// zero-run of A_l.
    pub fn left_parents(&self, v: SymbolId) -> Result<Vec<SymbolId>> {
        self.check_symbol(v)?;
        let val = v.0 as usize + 1;
        if val > self.a_l_zeros {
            return Ok(Vec::new());
        }
        let p0 = self.a_l.select0(val)?;
        let lo = self.a_l.rank1(p0)?;
        let hi = if val == self.a_l_zeros {
            self.n as usize
        } else {
            let p1 = self.a_l.select0(val + 1)?;
            self.a_l.rank1(p1 - 1)?
        };
        Ok((lo..hi).map(|k| SymbolId(self.sigma + k as u32)).collect())
    }

    /// All variables whose right child is `v`, ascending.
    pub fn right_parents(&self, v: SymbolId) -> Result<Vec<SymbolId>> {
        self.check_symbol(v)?;
        let sym = v.0 as u64;
        let total = self.a_r.rank(sym, self.n as usize - 1)?;
        let mut out = Vec::with_capacity(total);
        for k in 1..=total {
            let pos = self.a_r.select(sym, k)?;
            out.push(SymbolId(self.sigma + pos as u32));
        }
        Ok(out)
    }

    /// The variable deriving exactly `left right`, if one exists.
    pub fn lookup_rule(&self, left: SymbolId, right: SymbolId) -> Result<Option<SymbolId>> {
        if left.0 >= self.sigma + self.n || right.0 >= self.sigma + self.n {
            return Ok(None);
        }
        let val = left.0 as usize + 1;
        if val > self.a_l_zeros {
            return Ok(None);
        }
        let p0 = self.a_l.select0(val)?;
        let lo = self.a_l.rank1(p0)?;
        let hi = if val == self.a_l_zeros {
            self.n as usize
        } else {
            let p1 = self.a_l.select0(val + 1)?;
            self.a_l.rank1(p1 - 1)?
        };
        if lo == hi {
            return Ok(None);
        }
        let sym = right.0 as u64;
        let before = if lo == 0 {
            0
        } else {
            self.a_r.rank(sym, lo - 1)?
        };
        let upto = self.a_r.rank(sym, hi - 1)?;
        if upto == before {
            return Ok(None);
        }
        let pos = self.a_r.select(sym, before + 1)?;
        debug_assert!(lo <= pos && pos < hi);
        Ok(Some(SymbolId(self.sigma + pos as u32)))
    }

    /// Characteristic vector of any symbol. Stored vectors are cloned;
    /// unstored ones are rebuilt from children (at most two steps, since
    /// every unstored variable's children are stored, terminal, or a
    /// same-round node whose children are stored or terminal).
    pub fn char_vec(&self, v: SymbolId) -> Result<CharVec> {
        if v.0 < self.sigma {
            return Ok(CharVec::unit(v.0));
        }
        let i = self.check_variable(v)?;
        if self.fb.get(i as usize)? {
            let slot = self.fb.rank1(i as usize)? - 1;
            return Ok(self.cv_store[slot].clone());
        }
        let (l, r) = self.children(v)?;
        let mut cv = self.char_vec(l)?.merge(&self.char_vec(r)?);
        cv.add(v.0, 1);
        Ok(cv)
    }

    /// Serialized component sizes in bytes (tree encoding, vector store,
    /// length table), mirroring the build statistics breakdown.
    pub fn component_sizes(&self) -> (usize, usize, usize) {
        serial::component_sizes(self)
    }

    pub fn serialize(&self) -> Vec<u8> {
        serial::serialize(self)
    }

    pub fn deserialize(bytes: &[u8]) -> Result<EspIndex> {
        serial::deserialize(bytes)
    }

    pub(crate) fn a_l(&self) -> &BitVec {
        &self.a_l
    }

    pub(crate) fn a_r(&self) -> &IntSeq {
        &self.a_r
    }

    pub(crate) fn fb(&self) -> &BitVec {
        &self.fb
    }

    pub(crate) fn cv_store(&self) -> &[CharVec] {
        &self.cv_store
    }

    pub(crate) fn lens(&self) -> &[u64] {
        &self.lens
    }
}

fn stores_vector(round: usize, id: u32, root: u32) -> bool {
    round.is_multiple_of(2) || id == root
}

/// Computes characteristic vectors bottom-up one round at a time, keeping
/// only the previous round in memory, and collects those flagged in `fb`.
fn build_vector_store(g: &EspGrammar, fb: &BitVec) -> Result<Vec<CharVec>> {
    let sigma = g.sigma;
    let mut store: Vec<CharVec> = Vec::new();
    let mut prev: Vec<CharVec> = Vec::new();
    let mut prev_lo = 0u32;

    for r in 1..=g.rounds() {
        let lo = g.round_bounds[r - 1];
        let hi = g.round_bounds[r];
        let mut cur: Vec<Option<CharVec>> = vec![None; (hi - lo) as usize];

        let child_vec = |id: SymbolId, cur: &[Option<CharVec>]| -> Result<CharVec> {
            if id.0 < sigma {
                Ok(CharVec::unit(id.0))
            } else if id.0 >= lo {
                cur[(id.0 - lo) as usize]
                    .clone()
                    .ok_or_else(|| Error::invariant("same-round child vector not ready"))
            } else {
                prev.get(id.0.checked_sub(prev_lo).map_or(usize::MAX, |d| d as usize))
                    .cloned()
                    .ok_or_else(|| Error::invariant("child skips a round"))
            }
        };

        // First the rules whose right child lives a round below (this
        // covers every trigram lower node), then the tops that reference
        // same-round lower nodes.
        for pass in 0..2 {
            for id in lo..hi {
                if cur[(id - lo) as usize].is_some() {
                    continue;
                }
                let rule = &g.rules[(id - sigma) as usize];
                if pass == 0 && rule.right.0 >= lo {
                    continue;
                }
                let mut cv = child_vec(rule.left, &cur)?.merge(&child_vec(rule.right, &cur)?);
                cv.add(id, 1);
                cur[(id - lo) as usize] = Some(cv);
            }
        }

        let mut done = Vec::with_capacity(cur.len());
        for (k, cv) in cur.into_iter().enumerate() {
            let cv = cv.ok_or_else(|| Error::invariant("vector left uncomputed"))?;
            if fb.get((lo - sigma) as usize + k)? {
                store.push(cv.clone());
            }
            done.push(cv);
        }
        prev = done;
        prev_lo = lo;
    }
    Ok(store)
}
