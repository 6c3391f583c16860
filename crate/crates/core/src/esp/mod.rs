//! Edit sensitive parsing: deterministic construction of a balanced
//! straight-line program over a byte text.
//!
//! Each round partitions the current symbol sequence into segments (maximal
//! repetitions, long repetition-free stretches, short remainders), carves the
//! segments into blocks of two or three symbols, and replaces every block by
//! a variable. Blocks of three become a 2-2-tree: the top variable derives
//! the first symbol and a same-round intermediate variable holding the last
//! two. Identical blocks inside one round share their variable, so equal
//! substrings of the text tend to parse into equal subtrees, which is what
//! makes characteristic vectors comparable across strings.

mod parse;
mod query;
mod reduction;

pub use parse::{build_esp_tree, classify_segments, EspBuilder, Segment};
pub use query::{parse_query, QueryParse};
pub use reduction::{alphabet_reduction, iterated_log, select_landmarks, LabelSeq};

use std::fmt;

/// Identifier of a terminal or variable. Terminals occupy `[0, sigma)` in
/// ascending byte order; variables follow, grouped by round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_terminal(self, sigma: u32) -> bool {
        self.0 < sigma
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Binary production `lhs -> left right`; the lhs is implied by the rule's
/// position in [`EspGrammar::rules`]. `is_intermediate` marks variables that
/// were created as the dashed lower node of a 2-2-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub left: SymbolId,
    pub right: SymbolId,
    pub is_intermediate: bool,
}

/// Segment classification for one parse round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentType {
    /// Maximal repetition, possibly with an attached length-1 remainder.
    Type1,
    /// Repetition-free stretch long enough for landmark parsing.
    Type2,
    /// Short repetition-free remainder, parsed left-aligned.
    Type3,
}

/// The grammar produced by [`build_esp_tree`]: a straight-line program whose
/// variable ids are grouped by round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EspGrammar {
    /// Number of distinct terminals.
    pub sigma: u32,
    /// Rule of variable `sigma + i` at position `i`.
    pub rules: Vec<Rule>,
    /// Expansion length of variable `sigma + i` at position `i`.
    pub lens: Vec<u64>,
    /// First variable id of each round plus a final end sentinel, so round
    /// `r` (1-based) owns ids `round_bounds[r-1]..round_bounds[r]`.
    pub round_bounds: Vec<u32>,
    /// The single symbol the last round produced.
    pub root: SymbolId,
    /// Bytes present in the text, ascending; position = terminal id.
    pub terminal_bytes: Vec<u8>,
    /// Input sequence length of every round, for diagnostics and tests.
    pub round_input_lens: Vec<u64>,
}

impl EspGrammar {
    /// Number of variables.
    pub fn n(&self) -> u32 {
        self.rules.len() as u32
    }

    /// Number of parse rounds.
    pub fn rounds(&self) -> usize {
        self.round_bounds.len() - 1
    }

    /// Length of the indexed text.
    pub fn text_len(&self) -> u64 {
        self.len_of(self.root)
    }

    pub fn rule(&self, id: SymbolId) -> Option<&Rule> {
        id.0.checked_sub(self.sigma)
            .and_then(|i| self.rules.get(i as usize))
    }

    /// Expansion length of any symbol; terminals expand to one byte.
    pub fn len_of(&self, id: SymbolId) -> u64 {
        if id.0 < self.sigma {
            1
        } else {
            self.lens[(id.0 - self.sigma) as usize]
        }
    }

    /// 1-based round that created the variable, or 0 for terminals.
    pub fn round_of(&self, id: SymbolId) -> usize {
        if id.0 < self.sigma {
            return 0;
        }
        debug_assert!(id.0 < *self.round_bounds.last().unwrap());
        self.round_bounds.partition_point(|&b| b <= id.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_of_partitions_ids() {
        let g = EspGrammar {
            sigma: 2,
            rules: vec![
                Rule {
                    left: SymbolId(0),
                    right: SymbolId(1),
                    is_intermediate: false,
                },
                Rule {
                    left: SymbolId(2),
                    right: SymbolId(2),
                    is_intermediate: false,
                },
            ],
            lens: vec![2, 4],
            round_bounds: vec![2, 3, 4],
            root: SymbolId(3),
            terminal_bytes: vec![b'a', b'b'],
            round_input_lens: vec![4, 2],
        };
        assert_eq!(g.round_of(SymbolId(0)), 0);
        assert_eq!(g.round_of(SymbolId(2)), 1);
        assert_eq!(g.round_of(SymbolId(3)), 2);
        assert_eq!(g.rounds(), 2);
        assert_eq!(g.text_len(), 4);
    }
}
