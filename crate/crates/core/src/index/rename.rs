//! Variable renaming that makes the per-round rule arrays sorted by left
//! child, the precondition for the monotone left-child encoding.

use crate::esp::{EspGrammar, Rule, SymbolId};

/// Renames every variable within its round so that rule ids ascend by
/// (renamed left child, right key), where the right key of an
/// already-renamed earlier-round child is its new id and a same-round child
/// keeps its pre-rename id as a provisional key. Terminal ids and round
/// boundaries are unchanged; the renamed grammar derives the same text.
pub fn sorted_rename(g: &EspGrammar) -> EspGrammar {
    let sigma = g.sigma;
    let total = sigma as usize + g.rules.len();
    let mut perm: Vec<u32> = (0..total as u32).collect();

    for r in 1..=g.rounds() {
        let lo = g.round_bounds[r - 1];
        let hi = g.round_bounds[r];
        let mut ids: Vec<u32> = (lo..hi).collect();
        ids.sort_by_key(|&id| {
            let rule = &g.rules[(id - sigma) as usize];
            let left_key = perm[rule.left.index()];
            let right_key = if rule.right.0 < lo {
                perm[rule.right.index()]
            } else {
                rule.right.0
            };
            (left_key, right_key)
        });
        for (k, &id) in ids.iter().enumerate() {
            perm[id as usize] = lo + k as u32;
        }
    }

    let mut rules = vec![
        Rule {
            left: SymbolId(0),
            right: SymbolId(0),
            is_intermediate: false,
        };
        g.rules.len()
    ];
    let mut lens = vec![0u64; g.lens.len()];
    for (i, rule) in g.rules.iter().enumerate() {
        let old = sigma + i as u32;
        let new = perm[old as usize];
        rules[(new - sigma) as usize] = Rule {
            left: SymbolId(perm[rule.left.index()]),
            right: SymbolId(perm[rule.right.index()]),
            is_intermediate: rule.is_intermediate,
        };
        lens[(new - sigma) as usize] = g.lens[i];
    }

    EspGrammar {
        sigma,
        rules,
        lens,
        round_bounds: g.round_bounds.clone(),
        root: SymbolId(perm[g.root.index()]),
        terminal_bytes: g.terminal_bytes.clone(),
        round_input_lens: g.round_input_lens.clone(),
    }
}
