//! Brute-force references for tests and the CLI's verification mode: a
//! tiny exact edit-distance-with-moves solver, plain uncompressed grammar
//! walks (navigation, characteristic vectors, positions, window covers),
//! and exhaustive stab enumeration. Everything here favors obviousness over
//! speed and shares no code with the succinct production paths.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::esp::{EspGrammar, SymbolId};
use crate::index::{CharVec, EspIndex};
use crate::{Error, Result};

/// Caps for the exact edit-distance search.
#[derive(Debug, Clone, Copy)]
pub struct EdmConfig {
    /// Longest input string accepted.
    pub max_len: usize,
    /// Deepest edit script explored.
    pub max_depth: u64,
}

impl Default for EdmConfig {
    fn default() -> Self {
        EdmConfig {
            max_len: 6,
            max_depth: 3,
        }
    }
}

fn push_neighbors(u: &[u8], alphabet: &[u8], len_cap: usize, out: &mut Vec<Vec<u8>>) {
    let m = u.len();
    for i in 0..m {
        let mut v = u.to_vec();
        v.remove(i);
        out.push(v);
    }
    if m < len_cap {
        for i in 0..=m {
            for &c in alphabet {
                let mut v = u.to_vec();
                v.insert(i, c);
                out.push(v);
            }
        }
    }
    for i in 0..m {
        for &c in alphabet {
            if c != u[i] {
                let mut v = u.to_vec();
                v[i] = c;
                out.push(v);
            }
        }
    }
    // One substring move swaps two adjacent blocks: u[i..j) and u[j..k).
    // Moving a block left past another is the same swap seen from the other
    // block, so this enumeration covers both directions.
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..=m {
                let mut v = Vec::with_capacity(m);
                v.extend_from_slice(&u[..i]);
                v.extend_from_slice(&u[j..k]);
                v.extend_from_slice(&u[i..j]);
                v.extend_from_slice(&u[k..]);
                out.push(v);
            }
        }
    }
}

/// Every string reachable from `s` within `cfg.max_depth` unit edits
/// (insertion, deletion, replacement, substring move) over `alphabet`,
/// mapped to its exact distance.
pub fn edm_neighborhood(
    s: &[u8],
    alphabet: &[u8],
    cfg: &EdmConfig,
) -> Result<HashMap<Vec<u8>, u64>> {
    if s.len() > cfg.max_len {
        return Err(Error::invariant("edm input exceeds the configured cap"));
    }
    let len_cap = cfg.max_len + cfg.max_depth as usize;
    let mut dist: HashMap<Vec<u8>, u64> = HashMap::new();
    dist.insert(s.to_vec(), 0);
    let mut queue: VecDeque<Vec<u8>> = VecDeque::new();
    queue.push_back(s.to_vec());
    let mut scratch = Vec::new();
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d == cfg.max_depth {
            continue;
        }
        scratch.clear();
        push_neighbors(&u, alphabet, len_cap, &mut scratch);
        for v in scratch.drain(..) {
            if !dist.contains_key(&v) {
                dist.insert(v.clone(), d + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Exact edit distance with moves between `s` and `q`, or None when it
/// exceeds `cfg.max_depth`. Only characters of the two inputs are ever
/// inserted or substituted; an optimal script never needs others.
pub fn exact_edm(s: &[u8], q: &[u8], cfg: &EdmConfig) -> Result<Option<u64>> {
    if s.len() > cfg.max_len || q.len() > cfg.max_len {
        return Err(Error::invariant("edm input exceeds the configured cap"));
    }
    let mut alphabet: Vec<u8> = s.iter().chain(q).copied().collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    let dist = edm_neighborhood(s, &alphabet, cfg)?;
    Ok(dist.get(q).copied())
}

/// An uncompressed copy of a grammar: flat child, length, and terminal
/// tables, navigated by direct array access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainGrammar {
    pub sigma: u32,
    pub terminal_bytes: Vec<u8>,
    /// Children of variable `sigma + i` at position `i`.
    pub rules: Vec<(u32, u32)>,
    /// Expansion length of variable `sigma + i` at position `i`.
    pub lens: Vec<u64>,
    pub root: u32,
}

impl PlainGrammar {
    pub fn from_grammar(g: &EspGrammar) -> PlainGrammar {
        PlainGrammar {
            sigma: g.sigma,
            terminal_bytes: g.terminal_bytes.clone(),
            rules: g.rules.iter().map(|r| (r.left.0, r.right.0)).collect(),
            lens: g.lens.clone(),
            root: g.root.0,
        }
    }

    /// Decodes the index's stored tree back into flat tables.
    pub fn from_index(idx: &EspIndex) -> Result<PlainGrammar> {
        let mut rules = Vec::with_capacity(idx.n() as usize);
        let mut lens = Vec::with_capacity(idx.n() as usize);
        for i in 0..idx.n() {
            let v = SymbolId(idx.sigma() + i);
            let (l, r) = idx.children(v)?;
            rules.push((l.0, r.0));
            lens.push(idx.len_of(v));
        }
        Ok(PlainGrammar {
            sigma: idx.sigma(),
            terminal_bytes: idx.terminal_bytes().to_vec(),
            rules,
            lens,
            root: idx.root().0,
        })
    }

    pub fn symbol_count(&self) -> u32 {
        self.sigma + self.rules.len() as u32
    }

    pub fn len_of(&self, id: u32) -> u64 {
        if id < self.sigma {
            1
        } else {
            self.lens[(id - self.sigma) as usize]
        }
    }

    /// Children of a variable, None for terminals.
    pub fn children(&self, id: u32) -> Option<(u32, u32)> {
        id.checked_sub(self.sigma)
            .map(|i| self.rules[i as usize])
    }

    pub fn expand(&self, id: u32) -> Vec<u8> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(s) = stack.pop() {
            match self.children(s) {
                None => out.push(self.terminal_bytes[s as usize]),
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// Parent lists per symbol id: `by_left[x]` holds every variable whose
    /// left child is x, `by_right[x]` the right-child counterpart.
    pub fn parent_maps(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let total = self.symbol_count() as usize;
        let mut by_left = vec![Vec::new(); total];
        let mut by_right = vec![Vec::new(); total];
        for (i, &(l, r)) in self.rules.iter().enumerate() {
            let id = self.sigma + i as u32;
            by_left[l as usize].push(id);
            by_right[r as usize].push(id);
        }
        (by_left, by_right)
    }

    /// The (left, right) -> variable dictionary.
    pub fn rule_map(&self) -> HashMap<(u32, u32), u32> {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, &lr)| (lr, self.sigma + i as u32))
            .collect()
    }
}

/// Characteristic vectors as plain frequency maps, memoized per symbol and
/// built by direct recursion over the flat tables.
pub struct PlainCharVecs {
    memo: Vec<Option<Rc<HashMap<u32, u64>>>>,
}

impl PlainCharVecs {
    pub fn new(g: &PlainGrammar) -> Self {
        PlainCharVecs {
            memo: vec![None; g.symbol_count() as usize],
        }
    }

    pub fn f(&mut self, g: &PlainGrammar, id: u32) -> Rc<HashMap<u32, u64>> {
        if let Some(m) = &self.memo[id as usize] {
            return m.clone();
        }
        let mut map: HashMap<u32, u64> = HashMap::new();
        if let Some((l, r)) = g.children(id) {
            for (&k, &v) in self.f(g, l).iter() {
                *map.entry(k).or_insert(0) += v;
            }
            for (&k, &v) in self.f(g, r).iter() {
                *map.entry(k).or_insert(0) += v;
            }
        }
        *map.entry(id).or_insert(0) += 1;
        let rc = Rc::new(map);
        self.memo[id as usize] = Some(rc.clone());
        rc
    }
}

/// L1 distance between a sparse pattern vector and a plain frequency map.
pub fn l1_against_map(f_q: &CharVec, g: &HashMap<u32, u64>) -> u64 {
    let mut sum = 0u64;
    for &(sym, cnt) in f_q.pairs() {
        sum += (cnt as u64).abs_diff(g.get(&sym).copied().unwrap_or(0));
    }
    for (&sym, &cnt) in g {
        if f_q.get(sym) == 0 {
            sum += cnt;
        }
    }
    sum
}

/// Appends the maximal subtrees of `node` (spanning text offsets
/// `[node_start, node_start + len)`, 0-based) fully inside `[l, r)`, in text
/// order.
pub fn cover_range(g: &PlainGrammar, node: u32, node_start: u64, l: u64, r: u64, out: &mut Vec<u32>) {
    let len = g.len_of(node);
    if r <= node_start || node_start + len <= l {
        return;
    }
    if l <= node_start && node_start + len <= r {
        out.push(node);
        return;
    }
    let (a, b) = g
        .children(node)
        .expect("a partially overlapping node spans at least two bytes");
    cover_range(g, a, node_start, l, r, out);
    cover_range(g, b, node_start + g.len_of(a), l, r, out);
}

/// Maximal subtree decomposition of the window starting at 0-based `pos0`.
pub fn window_cover(g: &PlainGrammar, pos0: u64, q_len: u64) -> Vec<u32> {
    let mut out = Vec::new();
    cover_range(g, g.root, 0, pos0, pos0 + q_len, &mut out);
    out
}

/// Distance of one window against the pattern vector, by direct walk.
pub fn window_l1_at(
    g: &PlainGrammar,
    cvs: &mut PlainCharVecs,
    f_q: &CharVec,
    pos0: u64,
    q_len: u64,
) -> u64 {
    let mut acc: HashMap<u32, u64> = HashMap::new();
    for piece in window_cover(g, pos0, q_len) {
        for (&k, &v) in cvs.f(g, piece).iter() {
            *acc.entry(k).or_insert(0) += v;
        }
    }
    l1_against_map(f_q, &acc)
}

/// Distance of every window of `q_len` bytes against the pattern vector,
/// indexed by 0-based window start.
pub fn window_l1(g: &PlainGrammar, f_q: &CharVec, q_len: u64) -> Vec<u64> {
    let text_len = g.len_of(g.root);
    debug_assert!(q_len >= 1 && q_len <= text_len);
    let mut cvs = PlainCharVecs::new(g);
    (0..=text_len - q_len)
        .map(|pos0| window_l1_at(g, &mut cvs, f_q, pos0, q_len))
        .collect()
}

/// 1-based positions of every symbol, found by one full traversal of the
/// parse tree, indexed by symbol id.
pub fn plain_positions(g: &PlainGrammar) -> Vec<Vec<u64>> {
    fn walk(g: &PlainGrammar, id: u32, pos: u64, out: &mut Vec<Vec<u64>>) {
        out[id as usize].push(pos);
        if let Some((l, r)) = g.children(id) {
            walk(g, l, pos, out);
            walk(g, r, pos + g.len_of(l), out);
        }
    }
    let mut out = vec![Vec::new(); g.symbol_count() as usize];
    walk(g, g.root, 1, &mut out);
    for v in &mut out {
        v.sort_unstable();
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
    out
}

/// Every (variable, split) pair whose window crosses the variable's child
/// boundary: the exhaustive candidate space for a pattern of `q_len` bytes.
pub fn enumerate_stabbed(g: &PlainGrammar, q_len: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    for (i, &(a, b)) in g.rules.iter().enumerate() {
        if g.lens[i] < q_len {
            continue;
        }
        let j_min = q_len.saturating_sub(g.len_of(a));
        let j_max = q_len.min(g.len_of(b));
        for j in j_min..=j_max {
            out.push((g.sigma + i as u32, j));
        }
    }
    out
}

/// The decomposition scored for one stabbed window: maximal subtrees of the
/// left child covering its last `q_len - j` bytes, then of the right child
/// covering its first `j` bytes.
pub fn stab_decomposition(g: &PlainGrammar, x: u32, j: u64, q_len: u64) -> Vec<u32> {
    let (a, b) = g.children(x).expect("stab nodes are variables");
    let la = g.len_of(a);
    let mut out = Vec::new();
    if q_len - j > 0 {
        cover_range(g, a, 0, la - (q_len - j), la, &mut out);
    }
    if j > 0 {
        cover_range(g, b, la, la, la + j, &mut out);
    }
    out
}
