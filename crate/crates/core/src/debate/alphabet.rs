//! The two communication alphabets.
//!
//! Public symbols (visible to the opposing prover) carry configuration
//! material: tape symbols, the configuration delimiter `$`, the round
//! separator `#`, and the two universal-choice announcement symbols.
//! Private symbols are the claim markers only the verifier sees.

use serde::{Deserialize, Serialize};

use crate::machines::{MachineSpec, TapeSymbol};

/// A symbol from the public alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PublicSymbol {
    /// `$`, preceding every configuration.
    Delim,
    /// `#`, separating rounds.
    RoundSep,
    /// Universal-choice announcement (partial-information mode).
    Choice(u8),
    /// A configuration symbol: work cell or head marker.
    Tape(TapeSymbol),
}

/// A symbol from the private alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrivateSymbol {
    /// Matches one opponent symbol, claiming nothing.
    Zero,
    /// Opens a transition-error claim at a `$` slot.
    Sigma,
    /// Marks position `j` inside the first claimed configuration.
    Tau,
    /// Marks position `k` inside the second claimed configuration.
    Upsilon,
    /// Claims the current configuration never ends.
    Infinity,
}

/// What the second prover can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum P0Symbol {
    Public(PublicSymbol),
    Private(PrivateSymbol),
}

impl PublicSymbol {
    pub fn render(&self, spec: &MachineSpec) -> String {
        match self {
            PublicSymbol::Delim => "$".into(),
            PublicSymbol::RoundSep => "#".into(),
            PublicSymbol::Choice(c) => format!("C{c}"),
            PublicSymbol::Tape(TapeSymbol::Cell { sym, digit }) => match digit {
                Some(d) => format!("{}'{d}", spec.work_name(*sym)),
                None => spec.work_name(*sym).to_string(),
            },
            PublicSymbol::Tape(TapeSymbol::Head { state, dir }) => {
                let d = match dir {
                    -1 => "-",
                    0 => ".",
                    _ => "+",
                };
                format!("[{}{d}]", spec.state_name(*state))
            }
        }
    }
}

impl P0Symbol {
    pub fn render(&self, spec: &MachineSpec) -> String {
        match self {
            P0Symbol::Public(p) => p.render(spec),
            P0Symbol::Private(PrivateSymbol::Zero) => "0".into(),
            P0Symbol::Private(PrivateSymbol::Sigma) => "ς".into(),
            P0Symbol::Private(PrivateSymbol::Tau) => "τ".into(),
            P0Symbol::Private(PrivateSymbol::Upsilon) => "υ".into(),
            P0Symbol::Private(PrivateSymbol::Infinity) => "∞".into(),
        }
    }

    pub fn is_public(&self) -> bool {
        matches!(self, P0Symbol::Public(_))
    }
}

/// Descriptive view of the two alphabets for a machine; used by tests and
/// reports to assert the disjointness invariant.
#[derive(Debug, Clone)]
pub struct DebateAlphabet {
    pub public_size: usize,
    pub private_size: usize,
}

impl DebateAlphabet {
    /// Public alphabet: all cell symbols (with digit variants when the
    /// machine is instrumented), all marker symbols, `$`, `#`, and the two
    /// choice symbols. The private alphabet is the five claim markers. The
    /// two sets live in different enum variants, so their disjointness is
    /// structural; the sizes are still useful for reports.
    pub fn for_machine(spec: &MachineSpec) -> Self {
        let digit_variants = match spec.counter {
            Some(p) => 1usize << p.c,
            None => 1,
        };
        let cells = spec.work_alphabet.len() * digit_variants;
        let markers = spec.state_names.len() * 3;
        DebateAlphabet { public_size: cells + markers + 2 + 2, private_size: 5 }
    }
}
