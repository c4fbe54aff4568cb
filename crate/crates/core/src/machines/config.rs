//! Configurations and single-move semantics.
//!
//! A configuration is a symbol string `u H x`: the work tape contents with
//! one embedded head marker. The marker sits immediately before the scanned
//! cell, so a marker at string position `p` (1-based) means the work head
//! scans tape cell `p`. Trailing blank cells after the marker are trimmed,
//! which keeps the initial configuration at length one.
//!
//! Instrumented machines carry one counter digit per tape cell (base `2^c`,
//! least significant digit at cell 1). The counter counts performed actions;
//! an action that would raise it to the ceiling halts the machine rejecting
//! and is never materialized as a successor.

use serde::{Deserialize, Serialize};

use super::spec::{InputSymbol, MachineSpec, StateId, WorkSym};

/// One symbol of a configuration string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TapeSymbol {
    /// A work-tape cell; `digit` is the counter-track digit when the
    /// machine is instrumented.
    Cell { sym: WorkSym, digit: Option<u8> },
    /// The state/direction marker: the machine state plus the input-head
    /// direction of the move that produced this configuration.
    Head { state: StateId, dir: i8 },
}

impl TapeSymbol {
    pub fn is_head(&self) -> bool {
        matches!(self, TapeSymbol::Head { .. })
    }

    pub fn cell(sym: WorkSym) -> Self {
        TapeSymbol::Cell { sym, digit: None }
    }
}

/// A work-tape configuration with exactly one embedded head marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub syms: Vec<TapeSymbol>,
}

/// One slot of a three-symbol window; `Pad` stands for the configuration
/// delimiter at either boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowSlot {
    Pad,
    Sym(TapeSymbol),
}

/// The `(left, marker, right)` window centered on the head marker.
pub type Triple = [WindowSlot; 3];

/// A one-move successor: the configuration, the input-head direction taken,
/// and the index of the transition entry among the applicable choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successor {
    pub config: Configuration,
    pub d_input: i8,
    pub choice: usize,
}

impl Configuration {
    /// String position (0-based) of the head marker.
    pub fn marker_pos(&self) -> usize {
        self.syms
            .iter()
            .position(TapeSymbol::is_head)
            .expect("configuration without a head marker")
    }

    pub fn state(&self) -> StateId {
        match self.syms[self.marker_pos()] {
            TapeSymbol::Head { state, .. } => state,
            _ => unreachable!(),
        }
    }

    pub fn dir(&self) -> i8 {
        match self.syms[self.marker_pos()] {
            TapeSymbol::Head { dir, .. } => dir,
            _ => unreachable!(),
        }
    }

    pub fn is_accepting(&self, spec: &MachineSpec) -> bool {
        self.state() == spec.accept
    }

    /// Tape cells in order, marker skipped.
    pub fn cells(&self) -> impl Iterator<Item = (WorkSym, Option<u8>)> + '_ {
        self.syms.iter().filter_map(|s| match *s {
            TapeSymbol::Cell { sym, digit } => Some((sym, digit)),
            TapeSymbol::Head { .. } => None,
        })
    }

    /// Decodes the counter track, little-endian base `2^c`.
    pub fn counter_value(&self, c: u32) -> u128 {
        let mut v: u128 = 0;
        for (i, (_, digit)) in self.cells().enumerate() {
            v += (digit.unwrap_or(0) as u128) << (c as u64 * i as u64);
        }
        v
    }

    pub fn well_formed(&self) -> bool {
        !self.syms.is_empty() && self.syms.iter().filter(|s| s.is_head()).count() == 1
    }
}

/// The length-1 configuration holding the start state with direction 0.
pub fn initial_configuration(spec: &MachineSpec) -> Configuration {
    Configuration {
        syms: vec![TapeSymbol::Head { state: spec.start, dir: 0 }],
    }
}

/// The `(left, marker, right)` triple at the head marker, boundary slots
/// padded with the configuration delimiter.
pub fn window_at_head(config: &Configuration) -> Triple {
    let p = config.marker_pos();
    let slot = |i: isize| -> WindowSlot {
        if i < 0 || i as usize >= config.syms.len() {
            WindowSlot::Pad
        } else {
            WindowSlot::Sym(config.syms[i as usize])
        }
    };
    [slot(p as isize - 1), WindowSlot::Sym(config.syms[p]), slot(p as isize + 1)]
}

/// All configurations reachable in exactly one machine move while scanning
/// `scanned` on the input tape. `ceiling` is the counter budget for the
/// current input length, `None` when uninstrumented. Halting-state
/// configurations have no successors, and moves whose counter increment
/// would reach the ceiling halt the machine rejecting instead of producing
/// a configuration.
pub fn successors(
    spec: &MachineSpec,
    config: &Configuration,
    scanned: InputSymbol,
    ceiling: Option<u128>,
) -> Vec<Successor> {
    debug_assert!(config.well_formed());
    let state = config.state();
    if spec.is_halting(state) {
        return Vec::new();
    }

    let instrumented = spec.counter.is_some();
    let c_bits = spec.counter.map(|p| p.c).unwrap_or(0);
    let mpos = config.marker_pos();
    // 1-based tape index of the scanned cell.
    let head = mpos + 1;
    let mut cells: Vec<(WorkSym, Option<u8>)> = config.cells().collect();
    let scanned_work = cells.get(head - 1).map(|&(s, _)| s).unwrap_or(spec.blank);

    let value = instrumented.then(|| config.counter_value(c_bits));

    let mut out = Vec::new();
    for (choice, t) in spec.choices(state, scanned, scanned_work) {
        // The transition function never crosses the input end-markers.
        if (scanned == InputSymbol::LeftEnd && t.d_input < 0)
            || (scanned == InputSymbol::RightEnd && t.d_input > 0)
        {
            continue;
        }
        let new_head = head as isize + t.d_work as isize;
        if new_head < 1 {
            continue; // work tape is one-way infinite
        }
        if let (Some(v), Some(ceil)) = (value, ceiling) {
            if v + 1 >= ceil {
                continue; // budget exhausted: the action halts the machine rejecting
            }
        }

        let mut tape = cells.clone();
        if tape.len() < head {
            tape.resize(head, (spec.blank, instrumented.then_some(0)));
        }
        tape[head - 1].0 = t.write;
        if instrumented {
            increment_counter(&mut tape, c_bits, spec.blank);
        }

        let new_head = new_head as usize;
        let mut syms: Vec<TapeSymbol> = Vec::with_capacity(tape.len() + 1);
        for (i, &(sym, digit)) in tape.iter().enumerate() {
            if i + 1 == new_head {
                syms.push(TapeSymbol::Head { state: t.to, dir: t.d_input });
            }
            syms.push(TapeSymbol::Cell { sym, digit });
        }
        if new_head > tape.len() {
            syms.push(TapeSymbol::Head { state: t.to, dir: t.d_input });
        }
        let mut cfg = Configuration { syms };
        trim_trailing_blanks(&mut cfg, spec.blank);
        out.push(Successor { config: cfg, d_input: t.d_input, choice });
    }
    // Borrowck: `cells` is otherwise moved into the closure above.
    let _ = &mut cells;
    out
}

/// Adds one to the counter track, extending the tape when the carry runs
/// past the last cell.
fn increment_counter(tape: &mut Vec<(WorkSym, Option<u8>)>, c_bits: u32, blank: WorkSym) {
    let max_digit = ((1u32 << c_bits) - 1) as u8;
    let mut i = 0;
    loop {
        if i == tape.len() {
            tape.push((blank, Some(0)));
        }
        let d = tape[i].1.unwrap_or(0);
        if d == max_digit {
            tape[i].1 = Some(0);
            i += 1;
        } else {
            tape[i].1 = Some(d + 1);
            return;
        }
    }
}

/// Removes trailing blank cells with zero counter digit after the marker.
fn trim_trailing_blanks(cfg: &mut Configuration, blank: WorkSym) {
    while cfg.syms.len() > 1 {
        match *cfg.syms.last().unwrap() {
            TapeSymbol::Cell { sym, digit } if sym == blank && digit.unwrap_or(0) == 0 => {
                cfg.syms.pop();
            }
            _ => break,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::parse_machine;

    fn two_choice() -> MachineSpec {
        parse_machine(
            "two-choice",
            "\
kind: nondeterministic
states: q0 q1 q2 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _ X Y
space_bound: linear 2
delta: q0 < _ -> q1 X +1 +1
delta: q0 < _ -> q2 Y 0 0
delta: q1 a _ -> qa _ 0 0
",
        )
        .unwrap()
    }

    #[test]
    fn initial_configuration_is_single_marker() {
        let spec = two_choice();
        let init = initial_configuration(&spec);
        assert_eq!(init.syms.len(), 1);
        assert_eq!(init.state(), spec.start);
        assert_eq!(init.dir(), 0);
        assert_eq!(window_at_head(&init), [WindowSlot::Pad, WindowSlot::Sym(init.syms[0]), WindowSlot::Pad]);
    }

    #[test]
    fn two_choice_state_yields_two_distinct_successors() {
        let spec = two_choice();
        let init = initial_configuration(&spec);
        let succ = successors(&spec, &init, InputSymbol::LeftEnd, None);
        assert_eq!(succ.len(), 2);
        // Choice 0: write X, move both heads right. Tape [X], head at 2.
        let a = &succ[0].config;
        assert_eq!(a.syms.len(), 2);
        assert_eq!(a.state(), StateId(1));
        assert_eq!(succ[0].d_input, 1);
        assert_eq!(a.marker_pos(), 1);
        // Choice 1: write Y, stay. Marker first, Y under the head.
        let b = &succ[1].config;
        assert_eq!(b.state(), StateId(2));
        assert_eq!(b.marker_pos(), 0);
        assert_eq!(b.syms.len(), 2);
    }

    #[test]
    fn accept_state_has_no_successors() {
        let spec = two_choice();
        let cfg = Configuration { syms: vec![TapeSymbol::Head { state: spec.accept, dir: 0 }] };
        assert!(successors(&spec, &cfg, InputSymbol::Sym('a'), None).is_empty());
    }

    #[test]
    fn writing_blank_at_the_frontier_trims() {
        let spec = parse_machine(
            "trim",
            "\
kind: deterministic
states: q0 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _ X
space_bound: linear 1
delta: q0 < _ -> qa _ 0 0
",
        )
        .unwrap();
        let succ = successors(&spec, &initial_configuration(&spec), InputSymbol::LeftEnd, None);
        // The written blank is trimmed: the accepting configuration is the
        // lone marker again.
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].config.syms.len(), 1);
        assert!(succ[0].config.is_accepting(&spec));
    }

    #[test]
    fn counter_track_counts_actions() {
        let spec = two_choice();
        let spec = crate::machines::instrument_with_counter(&spec, crate::machines::CounterParams { c: 1 }).unwrap();
        let ceiling = Some(16);
        let init = initial_configuration(&spec);
        assert_eq!(init.counter_value(1), 0);
        let s1 = successors(&spec, &init, InputSymbol::LeftEnd, ceiling);
        for s in &s1 {
            assert_eq!(s.config.counter_value(1), 1);
        }
        let s2 = successors(&spec, &s1[0].config, InputSymbol::Sym('a'), ceiling);
        assert_eq!(s2[0].config.counter_value(1), 2);
    }

    #[test]
    fn ceiling_one_kills_every_move() {
        let spec = two_choice();
        let spec = crate::machines::instrument_with_counter(&spec, crate::machines::CounterParams { c: 1 }).unwrap();
        let init = initial_configuration(&spec);
        assert!(successors(&spec, &init, InputSymbol::LeftEnd, Some(1)).is_empty());
    }
}
