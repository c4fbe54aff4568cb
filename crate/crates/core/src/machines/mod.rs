//! Machine descriptions, configurations, and consistency predicates.
//!
//! A [`MachineSpec`] is a single-work-tape machine (deterministic,
//! nondeterministic, or alternating) with a separate read-only input tape.
//! Configurations are symbol strings with one embedded head marker whose
//! position encodes the work-head location; the marker also records the
//! input-head direction of the move that produced the configuration.

mod config;
mod local;
mod minimax;
mod parse;
mod search;
mod spec;

pub use config::{
    initial_configuration, successors, window_at_head, Configuration, Successor, TapeSymbol,
    Triple, WindowSlot,
};
pub use local::{head_windows_consistent, triple_pair_legitimate, triple_pair_spanned, Span};
pub use minimax::{accepting_strategy_tree, game_value, GameError, GameOracle, GameValue, StrategyTree};
pub use parse::parse_machine;
pub use search::{generate_acp, input_tape, replay_heads, stall_fabrication, AcpError, Path, StallPlan};
pub use spec::{
    instrument_with_counter, validate_machine, CounterParams, Diagnostic, InputSymbol, Kind,
    MachineError, MachineSpec, SpaceBound, StateId, StateMode, Transition, WorkSym,
};

/// Hard cap on the counter-track width in bits; `c * s(n)` must stay under
/// this so counter values fit in a `u128`.
pub const MAX_COUNTER_BITS: u32 = 120;
