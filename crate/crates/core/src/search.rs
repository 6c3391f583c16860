//! Query evaluation: candidate enumeration over stab nodes, the mu lower
//! bound, the L1 post-filter, position recovery, and result aggregation.
//!
//! A variable X stabs a window of |Q| bytes when the window splits across
//! X's children: j bytes into the right child, |Q| - j into the left. Each
//! split yields a decomposition R of maximal subtrees covering the window
//! left to right; the window's score is the L1 distance between the
//! pattern's characteristic vector and the sum over R. Entries of R outside
//! the pattern's support contribute their full mass (mu), which lower-bounds
//! the distance and drives pruning.

use std::collections::HashMap;
use std::rc::Rc;

use crate::esp::{parse_query, QueryParse, SymbolId};
use crate::index::EspIndex;
use crate::{Error, Result};

/// Knobs for [`search_with_options`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Worker threads scoring candidates. Zero behaves like one.
    pub threads: usize,
    /// Abort a candidate as soon as its accumulated mu exceeds tau. This
    /// never changes reported occurrences, only the work and the counters:
    /// a candidate's distance is at least its mu sum.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: 1,
            prune: true,
        }
    }
}

/// Work counters for one search run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes visited while forming decompositions.
    pub traversed_nodes: u64,
    /// Decompositions scored to completion (pruned ones do not count).
    pub candidates: u64,
    /// Candidates whose distance passed the threshold.
    pub accepted: u64,
    /// Accepted candidates expanded over every occurrence of their stab
    /// node, before deduplicating positions.
    pub occurrences: u64,
}

/// One reported window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    /// 1-based start of the window in the text.
    pub pos: u64,
    /// Smallest L1 distance over all candidates mapping to this position.
    pub dist: u64,
    /// Piece count of the decomposition behind `dist` (smallest such count
    /// on distance ties).
    pub decomp_len: u32,
}

/// Occurrences sorted by position, plus the run's counters.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub occurrences: Vec<Occurrence>,
    pub stats: SearchStats,
}

/// One scoring decomposition of a stabbed window.
#[derive(Debug, Clone)]
pub struct Candidate {
    /// The stab variable.
    pub stab: SymbolId,
    /// Bytes of the window inside the stab's right child.
    pub split: u64,
    /// Maximal subtrees covering the window, in text order. A symbol may
    /// appear more than once; every occurrence counts.
    pub decomposition: Vec<SymbolId>,
    /// Total mass of the decomposition outside the pattern support.
    pub mu_sum: u64,
}

/// Mass of `x`'s characteristic vector outside the pattern support `vq`
/// (sorted symbol ids): a lower bound on the L1 distance of any window
/// decomposition containing `x`.
pub fn mu(idx: &EspIndex, x: SymbolId, vq: &[u32]) -> Result<u64> {
    debug_assert!(vq.windows(2).all(|w| w[0] < w[1]));
    let f = idx.char_vec(x)?;
    let mut k = 0usize;
    let mut sum = 0u64;
    for &(sym, cnt) in f.pairs() {
        while k < vq.len() && vq[k] < sym {
            k += 1;
        }
        if !(k < vq.len() && vq[k] == sym) {
            sum += cnt as u64;
        }
    }
    Ok(sum)
}

/// Memoized child lookups. A scan decomposes windows under the same
/// variables over and over, and the succinct child decode dominates that
/// walk; caching turns repeat visits into an array read.
struct NavCache<'a> {
    idx: &'a EspIndex,
    kids: Vec<Option<(SymbolId, SymbolId)>>,
}

impl<'a> NavCache<'a> {
    fn new(idx: &'a EspIndex) -> Self {
        NavCache {
            idx,
            kids: vec![None; idx.n() as usize],
        }
    }

    fn children(&mut self, v: SymbolId) -> Result<(SymbolId, SymbolId)> {
        let slot = (v.0 - self.idx.sigma()) as usize;
        if let Some(c) = self.kids[slot] {
            return Ok(c);
        }
        let c = self.idx.children(v)?;
        self.kids[slot] = Some(c);
        Ok(c)
    }
}

/// Pieces covering the last `take` bytes of `val(v)`, appended in text order.
fn decompose_suffix(
    nav: &mut NavCache,
    v: SymbolId,
    take: u64,
    out: &mut Vec<SymbolId>,
    visited: &mut u64,
) -> Result<()> {
    debug_assert!(take >= 1 && take <= nav.idx.len_of(v));
    *visited += 1;
    if take == nav.idx.len_of(v) {
        out.push(v);
        return Ok(());
    }
    let (a, b) = nav.children(v)?;
    let lb = nav.idx.len_of(b);
    if take <= lb {
        decompose_suffix(nav, b, take, out, visited)
    } else {
        decompose_suffix(nav, a, take - lb, out, visited)?;
        out.push(b);
        Ok(())
    }
}

/// Pieces covering the first `take` bytes of `val(v)`, appended in text order.
fn decompose_prefix(
    nav: &mut NavCache,
    v: SymbolId,
    take: u64,
    out: &mut Vec<SymbolId>,
    visited: &mut u64,
) -> Result<()> {
    debug_assert!(take >= 1 && take <= nav.idx.len_of(v));
    *visited += 1;
    if take == nav.idx.len_of(v) {
        out.push(v);
        return Ok(());
    }
    let (a, b) = nav.children(v)?;
    let la = nav.idx.len_of(a);
    if take <= la {
        decompose_prefix(nav, a, take, out, visited)
    } else {
        out.push(a);
        decompose_prefix(nav, b, take - la, out, visited)
    }
}

/// A piece's vector restricted to the pattern support (as slot indices into
/// `vq`), plus its mass outside the support.
struct PieceInfo {
    restricted: Box<[(u32, u32)]>,
    mu: u64,
}

struct Evaluator<'a> {
    idx: &'a EspIndex,
    vq: &'a [u32],
    fq: &'a [u64],
    memo: HashMap<u32, PieceInfo>,
}

enum Scored {
    Pruned,
    Done { dist: u64, mu_sum: u64 },
}

impl<'a> Evaluator<'a> {
    fn new(idx: &'a EspIndex, vq: &'a [u32], fq: &'a [u64]) -> Self {
        Evaluator {
            idx,
            vq,
            fq,
            memo: HashMap::new(),
        }
    }

    fn piece(&mut self, p: SymbolId) -> Result<&PieceInfo> {
        if !self.memo.contains_key(&p.0) {
            let f = self.idx.char_vec(p)?;
            let mut restricted = Vec::new();
            let mut mu = 0u64;
            let mut k = 0usize;
            for &(sym, cnt) in f.pairs() {
                while k < self.vq.len() && self.vq[k] < sym {
                    k += 1;
                }
                if k < self.vq.len() && self.vq[k] == sym {
                    restricted.push((k as u32, cnt));
                } else {
                    mu += cnt as u64;
                }
            }
            self.memo.insert(
                p.0,
                PieceInfo {
                    restricted: restricted.into_boxed_slice(),
                    mu,
                },
            );
        }
        Ok(self.memo.get(&p.0).expect("inserted above"))
    }

    /// Accumulates a decomposition into `g` (a zeroed scratch of `vq`'s
    /// length) and scores it. With `prune`, gives up once mu alone exceeds
    /// tau; the distance of a pruned candidate would exceed tau as well.
    fn score(
        &mut self,
        pieces: &[SymbolId],
        g: &mut [u64],
        tau: u64,
        prune: bool,
    ) -> Result<Scored> {
        g.fill(0);
        let mut mu_sum = 0u64;
        for &p in pieces {
            let info = self.piece(p)?;
            mu_sum += info.mu;
            for &(slot, cnt) in info.restricted.iter() {
                g[slot as usize] += cnt as u64;
            }
            if prune && mu_sum > tau {
                return Ok(Scored::Pruned);
            }
        }
        let mut dist = mu_sum;
        for (have, want) in g.iter().zip(self.fq) {
            dist += want.abs_diff(*have);
        }
        Ok(Scored::Done { dist, mu_sum })
    }
}

fn support_of(qp: &QueryParse) -> (Vec<u32>, Vec<u64>) {
    let vq: Vec<u32> = qp.f_q.pairs().iter().map(|p| p.0).collect();
    let fq: Vec<u64> = qp.f_q.pairs().iter().map(|p| p.1 as u64).collect();
    (vq, fq)
}

/// Valid split range of the pattern across `x`'s children, or None when `x`
/// cannot stab a window of `q_len` bytes.
fn split_range(nav: &mut NavCache, x: SymbolId, q_len: u64) -> Result<Option<(u64, u64, u64)>> {
    if nav.idx.is_terminal(x) || nav.idx.len_of(x) < q_len {
        return Ok(None);
    }
    let (a, b) = nav.children(x)?;
    let la = nav.idx.len_of(a);
    let lb = nav.idx.len_of(b);
    Ok(Some((q_len.saturating_sub(la), q_len.min(lb), la)))
}

fn decompose(
    nav: &mut NavCache,
    x: SymbolId,
    j: u64,
    q_len: u64,
    out: &mut Vec<SymbolId>,
    visited: &mut u64,
) -> Result<()> {
    out.clear();
    let (a, b) = nav.children(x)?;
    if q_len - j > 0 {
        decompose_suffix(nav, a, q_len - j, out, visited)?;
    }
    if j > 0 {
        decompose_prefix(nav, b, j, out, visited)?;
    }
    debug_assert_eq!(out.iter().map(|&p| nav.idx.len_of(p)).sum::<u64>(), q_len);
    Ok(())
}

/// All scoring decompositions of windows stabbed by `x`, one per split,
/// in ascending split order. Only candidates whose mu sum stays within tau
/// are emitted; a larger mu sum already certifies a distance above tau.
/// Returns an empty list when `x` is too short to stab a window.
pub fn find_candidates(
    idx: &EspIndex,
    qp: &QueryParse,
    x: SymbolId,
    tau: u64,
) -> Result<Vec<Candidate>> {
    let (vq, _fq) = support_of(qp);
    let mut nav = NavCache::new(idx);
    let Some((j_min, j_max, _la)) = split_range(&mut nav, x, qp.q_len)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut pieces = Vec::new();
    let mut visited = 0u64;
    for j in j_min..=j_max {
        decompose(&mut nav, x, j, qp.q_len, &mut pieces, &mut visited)?;
        let mut mu_sum = 0u64;
        for &p in &pieces {
            mu_sum += mu(idx, p, &vq)?;
        }
        if mu_sum <= tau {
            out.push(Candidate {
                stab: x,
                split: j,
                decomposition: pieces.clone(),
                mu_sum,
            });
        }
    }
    Ok(out)
}

/// Scores one candidate: Some(distance) when the L1 distance between the
/// pattern vector and the decomposition's summed vector is within tau.
pub fn l1_post_filter(
    idx: &EspIndex,
    qp: &QueryParse,
    cand: &Candidate,
    tau: u64,
) -> Result<Option<u64>> {
    let (vq, fq) = support_of(qp);
    let mut ev = Evaluator::new(idx, &vq, &fq);
    let mut g = vec![0u64; vq.len()];
    match ev.score(&cand.decomposition, &mut g, tau, false)? {
        Scored::Pruned => unreachable!("scoring without pruning cannot abort"),
        Scored::Done { dist, .. } => Ok((dist <= tau).then_some(dist)),
    }
}

fn positions_memoized(
    idx: &EspIndex,
    x: SymbolId,
    memo: &mut HashMap<u32, Rc<Vec<u64>>>,
) -> Result<Rc<Vec<u64>>> {
    if let Some(v) = memo.get(&x.0) {
        return Ok(v.clone());
    }
    let val = if x == idx.root() {
        vec![1]
    } else {
        let mut acc: Vec<u64> = Vec::new();
        for p in idx.left_parents(x)? {
            let pp = positions_memoized(idx, p, memo)?;
            acc.extend_from_slice(&pp);
        }
        for p in idx.right_parents(x)? {
            let shift = idx.len_of(idx.left_child(p)?);
            let pp = positions_memoized(idx, p, memo)?;
            acc.extend(pp.iter().map(|&q| q + shift));
        }
        acc.sort_unstable();
        debug_assert!(
            acc.windows(2).all(|w| w[0] < w[1]),
            "every tree occurrence has one parent edge, so positions cannot repeat"
        );
        acc
    };
    let rc = Rc::new(val);
    memo.insert(x.0, rc.clone());
    Ok(rc)
}

/// All 1-based positions where `val(x)` occurs as a node of the parse tree,
/// sorted ascending. The root occurs exactly at position 1; every other
/// node inherits its parents' positions, shifted by the left sibling's
/// length when it is a right child.
pub fn compute_position(idx: &EspIndex, x: SymbolId) -> Result<Vec<u64>> {
    let mut memo = HashMap::new();
    let rc = positions_memoized(idx, x, &mut memo)?;
    Ok(rc.to_vec())
}

/// An accepted candidate, reduced to what position expansion needs: the
/// stab and the window's offset from each stab occurrence.
struct Accepted {
    stab: u32,
    shift: u64,
    dist: u64,
    decomp_len: u32,
}

#[allow(clippy::too_many_arguments)]
fn scan_range(
    idx: &EspIndex,
    vq: &[u32],
    fq: &[u64],
    q_len: u64,
    tau: u64,
    prune: bool,
    lo: u32,
    hi: u32,
) -> Result<(Vec<Accepted>, SearchStats)> {
    let mut ev = Evaluator::new(idx, vq, fq);
    let mut stats = SearchStats::default();
    let mut pieces: Vec<SymbolId> = Vec::new();
    let mut g = vec![0u64; vq.len()];
    let mut accepted = Vec::new();
    let mut nav = NavCache::new(idx);
    for id in lo..hi {
        let x = SymbolId(id);
        let Some((j_min, j_max, la)) = split_range(&mut nav, x, q_len)? else {
            continue;
        };
        for j in j_min..=j_max {
            decompose(&mut nav, x, j, q_len, &mut pieces, &mut stats.traversed_nodes)?;
            match ev.score(&pieces, &mut g, tau, prune)? {
                Scored::Pruned => {}
                Scored::Done { dist, mu_sum } => {
                    debug_assert!(mu_sum <= dist);
                    stats.candidates += 1;
                    if dist <= tau {
                        stats.accepted += 1;
                        accepted.push(Accepted {
                            stab: id,
                            shift: la - (q_len - j),
                            dist,
                            decomp_len: pieces.len() as u32,
                        });
                    }
                }
            }
        }
    }
    Ok((accepted, stats))
}

/// Searches with default options (single-threaded, pruning on).
pub fn search(idx: &EspIndex, query: &[u8], tau: u64) -> Result<SearchOutcome> {
    search_with_options(idx, query, tau, &SearchOptions::default())
}

/// Parses `query` against the index, then reports every window position
/// whose decomposition distance is within tau, sorted by position.
pub fn search_with_options(
    idx: &EspIndex,
    query: &[u8],
    tau: u64,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let qp = parse_query(idx, query)?;
    search_parsed(idx, &qp, tau, opts)
}

/// Search over an already parsed pattern. Useful when one pattern runs at
/// several thresholds.
pub fn search_parsed(
    idx: &EspIndex,
    qp: &QueryParse,
    tau: u64,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if qp.q_len > idx.text_len() {
        return Err(Error::QueryTooLong {
            query: qp.q_len as usize,
            text: idx.text_len() as usize,
        });
    }
    let (vq, fq) = support_of(qp);
    let sigma = idx.sigma();
    let n = idx.n();
    let threads = opts.threads.max(1).min(n as usize);

    let mut accepted: Vec<Accepted> = Vec::new();
    let mut stats = SearchStats::default();
    if threads <= 1 {
        let (a, s) = scan_range(idx, &vq, &fq, qp.q_len, tau, opts.prune, sigma, sigma + n)?;
        accepted = a;
        stats = s;
    } else {
        let chunk = n.div_ceil(threads as u32);
        let parts = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u32)
                .map(|t| {
                    let lo = sigma + t * chunk;
                    let hi = (lo + chunk).min(sigma + n);
                    let (vq, fq) = (&vq, &fq);
                    scope.spawn(move || {
                        scan_range(idx, vq, fq, qp.q_len, tau, opts.prune, lo, hi)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("scan worker panicked"))
                .collect::<Vec<_>>()
        });
        for part in parts {
            let (a, s) = part?;
            accepted.extend(a);
            stats.traversed_nodes += s.traversed_nodes;
            stats.candidates += s.candidates;
            stats.accepted += s.accepted;
        }
    }

    // Expand accepted candidates over the stab occurrences and keep, per
    // position, the smallest (distance, piece count).
    let mut pos_memo: HashMap<u32, Rc<Vec<u64>>> = HashMap::new();
    let mut best: HashMap<u64, (u64, u32)> = HashMap::new();
    for acc in &accepted {
        let pp = positions_memoized(idx, SymbolId(acc.stab), &mut pos_memo)?;
        stats.occurrences += pp.len() as u64;
        for &p in pp.iter() {
            let pos = p + acc.shift;
            debug_assert!(pos >= 1 && pos + qp.q_len - 1 <= idx.text_len());
            let entry = best.entry(pos).or_insert((acc.dist, acc.decomp_len));
            if (acc.dist, acc.decomp_len) < *entry {
                *entry = (acc.dist, acc.decomp_len);
            }
        }
    }

    let mut occurrences: Vec<Occurrence> = best
        .into_iter()
        .map(|(pos, (dist, decomp_len))| Occurrence {
            pos,
            dist,
            decomp_len,
        })
        .collect();
    occurrences.sort_unstable_by_key(|o| o.pos);
    Ok(SearchOutcome { occurrences, stats })
}
