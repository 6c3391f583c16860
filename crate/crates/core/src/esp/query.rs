//! Parsing a pattern with the vocabulary of an existing index.
//!
//! The pattern runs through the same round machinery as the indexed text,
//! but block naming consults the index dictionary first. Blocks the text
//! never formed receive temporary ids past the index universe, as do bytes
//! the text does not contain; those ids can never match an indexed node, so
//! their tree nodes count straight toward any comparison mass.

use std::collections::HashMap;

use super::parse::parse_round_with;
use super::reduction::iterated_log;
use super::SymbolId;
use crate::index::{CharVec, EspIndex};
use crate::{Error, Result};

/// A pattern parsed against an index.
#[derive(Debug, Clone)]
pub struct QueryParse {
    /// Pattern length in bytes.
    pub q_len: u64,
    /// Root of the pattern's parse tree. This is an index symbol when the
    /// whole pattern resolves into the index vocabulary (for example when
    /// the pattern equals the indexed text), a temporary id otherwise.
    pub root: SymbolId,
    /// Characteristic vector of the pattern's parse tree.
    pub f_q: CharVec,
    /// How many temporary symbols the parse introduced.
    pub temp_count: u32,
}

#[derive(Clone, Copy)]
enum TempNode {
    Terminal,
    Rule(SymbolId, SymbolId),
}

fn fetch_f(
    idx: &EspIndex,
    base: u32,
    id: SymbolId,
    temp_f: &[CharVec],
    memo: &mut HashMap<u32, CharVec>,
) -> Result<CharVec> {
    if id.0 >= base {
        return Ok(temp_f[(id.0 - base) as usize].clone());
    }
    if let Some(v) = memo.get(&id.0) {
        return Ok(v.clone());
    }
    let v = idx.char_vec(id)?;
    memo.insert(id.0, v.clone());
    Ok(v)
}

/// Parses `query` against `idx` and returns its characteristic vector. The
/// pattern must be at least two bytes; its type 2 threshold comes from its
/// own length, so a pattern equal to the indexed text parses identically.
pub fn parse_query(idx: &EspIndex, query: &[u8]) -> Result<QueryParse> {
    if query.len() < 2 {
        return Err(Error::QueryTooShort(query.len()));
    }
    let base = idx.symbol_count();
    let mut temps: Vec<TempNode> = Vec::new();
    let mut byte_map = [u32::MAX; 256];

    let mut seq: Vec<SymbolId> = Vec::with_capacity(query.len());
    for &b in query {
        let id = match idx.terminal_for_byte(b) {
            Some(t) => t,
            None => {
                if byte_map[b as usize] == u32::MAX {
                    byte_map[b as usize] = base + temps.len() as u32;
                    temps.push(TempNode::Terminal);
                }
                SymbolId(byte_map[b as usize])
            }
        };
        seq.push(id);
    }

    let threshold = 2 * iterated_log(query.len() as u64) as usize;
    let mut dict: HashMap<u64, u32> = HashMap::new();
    while seq.len() > 1 {
        let mut resolve = |l: SymbolId, r: SymbolId, _trigram_lower: bool| -> SymbolId {
            if let Some(id) = idx
                .lookup_rule(l, r)
                .expect("rule lookup cannot fail on in-range ids")
            {
                return id;
            }
            let key = ((l.0 as u64) << 32) | r.0 as u64;
            if let Some(&id) = dict.get(&key) {
                return SymbolId(id);
            }
            let id = base + temps.len() as u32;
            temps.push(TempNode::Rule(l, r));
            dict.insert(key, id);
            SymbolId(id)
        };
        seq = parse_round_with(&seq, threshold, &mut resolve)?;
    }
    let root = seq[0];

    // Temporaries are created children-first, so one forward pass computes
    // every vector bottom-up; index symbols resolve through the index.
    let mut memo: HashMap<u32, CharVec> = HashMap::new();
    let mut temp_f: Vec<CharVec> = Vec::with_capacity(temps.len());
    for (i, &node) in temps.iter().enumerate() {
        let f = match node {
            TempNode::Terminal => CharVec::unit(base + i as u32),
            TempNode::Rule(l, r) => {
                let fl = fetch_f(idx, base, l, &temp_f, &mut memo)?;
                let fr = fetch_f(idx, base, r, &temp_f, &mut memo)?;
                let mut f = fl.merge(&fr);
                f.add(base + i as u32, 1);
                f
            }
        };
        temp_f.push(f);
    }
    let f_q = fetch_f(idx, base, root, &temp_f, &mut memo)?;
    debug_assert_eq!(f_q.total(), 2 * query.len() as u64 - 1);

    Ok(QueryParse {
        q_len: query.len() as u64,
        root,
        f_q,
        temp_count: temps.len() as u32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pattern_parses_to_the_text_root() {
        // Renaming only affects blocking inside long repetition-free
        // segments above the first round. These texts have none: every
        // upper round consists of runs and short segments, so parsing the
        // text as a pattern must land exactly on the stored root.
        for text in [
            b"abab".as_slice(),
            b"mississippi",
            b"aaaabbbbaaaabbbb",
            b"xyxyxyxyxyxyxyxyxyxyxyxyxyxyxyxy",
        ] {
            let idx = EspIndex::build(text).unwrap();
            let qp = parse_query(&idx, text).unwrap();
            assert_eq!(qp.root, idx.root(), "text {text:?}");
            assert_eq!(qp.temp_count, 0);
            assert_eq!(
                qp.f_q.pairs(),
                idx.char_vec(idx.root()).unwrap().pairs(),
                "text {text:?}"
            );
        }
    }

    #[test]
    fn identity_pattern_vector_stays_close_to_the_root_vector() {
        // With long repetition-free upper rounds, renaming may shift
        // landmarks relative to build time, so the pattern tree can differ
        // from the stored tree; the vectors must still mostly agree.
        let text = b"abracadabra abracadabra abracadabra";
        let idx = EspIndex::build(text).unwrap();
        let qp = parse_query(&idx, text).unwrap();
        let root_f = idx.char_vec(idx.root()).unwrap();
        assert_eq!(qp.f_q.total(), root_f.total());
        // Terminals and first-round blocks agree exactly (terminal ids do
        // not change under renaming), so any gap is confined to the upper
        // rounds, which hold fewer than |Q| nodes.
        let d = qp.f_q.l1_distance(&root_f);
        assert!(d < qp.q_len, "identity distance too large: {d}");
    }

    #[test]
    fn vector_mass_counts_tree_nodes() {
        let idx = EspIndex::build(b"abracadabra abracadabra abracadabra").unwrap();
        for q in [
            b"ab".as_slice(),
            b"abra",
            b"cadabra ab",
            b"zzzz",
            b"entirely different words",
        ] {
            let qp = parse_query(&idx, q).unwrap();
            assert_eq!(qp.f_q.total(), 2 * q.len() as u64 - 1, "query {q:?}");
            assert_eq!(qp.q_len, q.len() as u64);
        }
    }

    #[test]
    fn unknown_bytes_become_temporaries() {
        let idx = EspIndex::build(b"abab").unwrap();
        let qp = parse_query(&idx, b"xy").unwrap();
        assert!(qp.temp_count >= 3, "two bytes plus their pair");
        assert!(qp.root.0 >= idx.symbol_count());
        // No index symbol can appear in a tree built from foreign bytes.
        assert!(qp.f_q.pairs().iter().all(|&(s, _)| s >= idx.symbol_count()));
    }

    #[test]
    fn substring_pattern_reuses_index_vocabulary() {
        let text = b"abcabcabcabcabcabcabcabcabcabc";
        let idx = EspIndex::build(text).unwrap();
        let qp = parse_query(&idx, b"abcabcabc").unwrap();
        // All pattern terminals exist in the text, and at least the bottom
        // round's pairs should hit the index dictionary.
        let known: u64 = qp
            .f_q
            .pairs()
            .iter()
            .filter(|&&(s, _)| s < idx.symbol_count())
            .map(|&(_, c)| c as u64)
            .sum();
        assert!(known > qp.q_len, "expected shared blocks, got {known}");
    }

    #[test]
    fn patterns_longer_than_the_text_still_parse() {
        let idx = EspIndex::build(b"abab").unwrap();
        let qp = parse_query(&idx, b"abababababab").unwrap();
        assert_eq!(qp.f_q.total(), 23);
    }

    #[test]
    fn rejects_short_patterns() {
        let idx = EspIndex::build(b"abab").unwrap();
        assert!(matches!(
            parse_query(&idx, b""),
            Err(Error::QueryTooShort(0))
        ));
        assert!(matches!(
            parse_query(&idx, b"a"),
            Err(Error::QueryTooShort(1))
        ));
    }
}
