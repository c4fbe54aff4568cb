//! The symbol-by-symbol two-prover communication model.
//!
//! The membership prover (P1) argues the input belongs to the language; the
//! opposing prover (P0) argues it does not. P1 emits public symbols only;
//! P0 mixes private claim markers with, in partial-information mode, public
//! universal-choice announcements. P0 sees everything P1 emits; P1 sees
//! only P0's public symbols.

mod adversary;
mod alphabet;
mod p0plan;
mod strategy;
mod transcript;

pub use adversary::{build_p0, build_p1, P0Spec, P1Spec, SelectorError};
pub use alphabet::{DebateAlphabet, P0Symbol, PrivateSymbol, PublicSymbol};
pub use p0plan::{cheats::SyntaxVariant, endless_lookahead, P0Strategy, RoundPlan};
pub use strategy::{
    honest_p1_tape, honest_round, Mode, P1Strategy, PartialCheat, PartialP1, RoundTape,
    StrategyError, TapeP1,
};
pub use transcript::{Origin, Transcript, TranscriptError, VisibleHistory};
