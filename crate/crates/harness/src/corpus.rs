//! The shipped desk-scale machine corpus.

use debatelab_core::machines::{parse_machine, MachineSpec};

/// One shipped machine with its curated member / non-member input lists.
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub about: &'static str,
    pub members: &'static [&'static str],
    pub non_members: &'static [&'static str],
}

/// Every machine shipped with the harness.
pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "subset-sum",
            source: include_str!("../machines/subset_sum.tm"),
            about: "nondeterministic block-subset selection, target two",
            members: &["11", "1+1", "11+1", "1+1+1", "11+11", "1+11+11"],
            non_members: &["1", "111", "1111", "111+1", "11111111"],
        },
        CorpusEntry {
            name: "downcount",
            source: include_str!("../machines/downcount.tm"),
            about: "deterministic exponential-time countdown, even-length language",
            members: &["11", "1111"],
            non_members: &["1", "111"],
        },
        CorpusEntry {
            name: "token-game",
            source: include_str!("../machines/token_game.tm"),
            about: "alternating last-token-wins subtraction game",
            members: &["1", "11", "1111", "11111"],
            non_members: &["111", "111111"],
        },
        CorpusEntry {
            name: "parity",
            source: include_str!("../machines/parity.tm"),
            about: "deterministic even-parity acceptor, single-marker configurations",
            members: &["11", "1111", "111111"],
            non_members: &["1", "111", "11111"],
        },
        CorpusEntry {
            name: "one-move",
            source: include_str!("../machines/one_move.tm"),
            about: "accepts every input in one move",
            members: &["a", "aa"],
            non_members: &[],
        },
        CorpusEntry {
            name: "two-cycle",
            source: include_str!("../machines/two_cycle.tm"),
            about: "accepts nothing; loops until a counter track stops it",
            members: &[],
            non_members: &["a", "aa"],
        },
    ]
}

/// Loads a corpus machine by name.
pub fn load(name: &str) -> Option<MachineSpec> {
    corpus()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| parse_machine(e.name, e.source).expect("shipped machines parse"))
}
