//! Local consistency predicates over three-symbol windows.
//!
//! The verifier never stores whole configurations; everything it checks about
//! a claimed pair of consecutive configurations is phrased over three-symbol
//! windows. Two predicates share one engine:
//!
//! - [`head_windows_consistent`] compares the windows centered on the two
//!   head markers, as the verifier does for every adjacent pair;
//! - [`triple_pair_legitimate`] compares two triples taken at the *same*
//!   string index of the two configurations, as claim processing does.
//!
//! Both ask an existential question: does some surrounding context plus some
//! transition entry (or, for two-move spans, an announced universal move
//! followed by one more move) explain the observation? The engine enumerates
//! bounded hypothetical contexts — window position, marker position,
//! configuration end — and micro-simulates the move(s) over a fragment with
//! unknown cells. Cells away from the marker must keep their first track;
//! counter digits must follow the little-endian carry chain, whose carry-in
//! is 1 at tape cell 1 and undetermined behind unseen cells.

use super::config::{TapeSymbol, Triple, WindowSlot};
use super::spec::{InputSymbol, MachineSpec, StateId, Transition, WorkSym};

/// How many machine moves separate the two observed configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Span {
    One,
    /// A universal move matching the announced choice index, then one more.
    Two { announced: usize },
}

/// The verifier's per-pair partial check: true iff some transition entry
/// maps `prev`'s head window to `next`'s head window while scanning
/// `scanned`. `announced` pins the first move to a declared choice index.
/// Both windows must carry the marker in their middle slot.
pub fn head_windows_consistent(
    spec: &MachineSpec,
    prev: &Triple,
    next: &Triple,
    scanned: InputSymbol,
    span: Span,
    announced: Option<usize>,
) -> bool {
    if !matches!(prev[1], WindowSlot::Sym(TapeSymbol::Head { .. }))
        || !matches!(next[1], WindowSlot::Sym(TapeSymbol::Head { .. }))
    {
        return false;
    }
    let (moves, announced) = match span {
        Span::One => (1, announced),
        Span::Two { announced } => (2, Some(announced)),
    };
    explain(
        spec,
        prev,
        next,
        &Rel { same_position: false, anchored: false, moves, announced, scanned: Some(scanned) },
    )
}

/// Claim-test predicate: true iff the two triples, read at the same string
/// index of two claimed-consecutive configurations, can appear when a
/// legitimate pair is properly aligned.
pub fn triple_pair_legitimate(spec: &MachineSpec, a: &Triple, b: &Triple) -> bool {
    triple_pair_spanned(spec, a, b, Span::One, None, false)
}

/// Generalized claim-test predicate. `anchored` pins the windows to string
/// position 1, which the verifier knows exactly when both claim markers sat
/// on the first symbol of their configurations. For one-move universal
/// spans, `announced` pins the move to the announced choice.
pub fn triple_pair_spanned(
    spec: &MachineSpec,
    a: &Triple,
    b: &Triple,
    span: Span,
    announced: Option<usize>,
    anchored: bool,
) -> bool {
    let (moves, announced) = match span {
        Span::One => (1, announced),
        Span::Two { announced } => (2, Some(announced)),
    };
    explain(
        spec,
        a,
        b,
        &Rel { same_position: true, anchored, moves, announced, scanned: None },
    )
}

struct Rel {
    same_position: bool,
    anchored: bool,
    moves: u8,
    announced: Option<usize>,
    scanned: Option<InputSymbol>,
}

/// Absolute embedding position standing in for "far from the origin": deep
/// enough that every marker hypothesis and carry pattern is expressible.
const GENERIC_POS: usize = 6;

fn explain(spec: &MachineSpec, a: &Triple, b: &Triple, rel: &Rel) -> bool {
    if head_count(a) > 1 || head_count(b) > 1 {
        return false;
    }
    if rel.same_position {
        // Same-index triples run off the configuration end to the right
        // only, so Pads must form a suffix.
        for w in [a, b] {
            for i in 0..2 {
                if matches!(w[i], WindowSlot::Pad) && !matches!(w[i + 1], WindowSlot::Pad) {
                    return false;
                }
            }
        }
        let positions: &[usize] =
            if rel.anchored { &[1] } else { &[1, 2, 3, 4, 5, GENERIC_POS] };
        for &wa in positions {
            let reach = rel.moves as usize + 1;
            let lo = wa.saturating_sub(2 + reach).max(1);
            let hi = wa + 3 + reach;
            for m in lo..=hi {
                match head_offset(a) {
                    Some(o) if m != wa + o => continue,
                    None if (wa..wa + 3).contains(&m) => continue,
                    _ => {}
                }
                if try_hypo(spec, a, b, rel, wa, m) {
                    return true;
                }
            }
        }
    } else {
        // Marker-centered windows: a Pad on the left means the marker opens
        // the configuration, so the window starts at the (nonexistent)
        // position 0. Other marker positions matter up to the embedding
        // depth because the second window may reach the origin.
        for m in 1..=GENERIC_POS {
            if (m == 1) != matches!(a[0], WindowSlot::Pad) {
                continue;
            }
            if try_hypo(spec, a, b, rel, m - 1, m) {
                return true;
            }
        }
    }
    false
}

fn head_count(t: &Triple) -> usize {
    t.iter().filter(|s| matches!(s, WindowSlot::Sym(TapeSymbol::Head { .. }))).count()
}

fn head_offset(t: &Triple) -> Option<usize> {
    t.iter().position(|s| matches!(s, WindowSlot::Sym(TapeSymbol::Head { .. })))
}

/// The window's slot covering absolute string position `pos` (windows start
/// at `wa`; `wa` may be 0, in which case slot 0 covers the nonexistent
/// position 0 and must be Pad).
fn window_slot(t: &Triple, wa: usize, pos: usize) -> Option<WindowSlot> {
    (pos >= wa && pos < wa + 3).then(|| t[pos - wa])
}

/// Candidate end positions for the first configuration given its window.
fn end_candidates(t: &Triple, wa: usize) -> Vec<usize> {
    match t.iter().position(|s| matches!(s, WindowSlot::Pad)) {
        // A Pad pins the end exactly, except a Pad at slot 0 of a
        // marker-centered window which only marks the left boundary.
        Some(0) if wa == 0 => match t.iter().skip(1).position(|s| matches!(s, WindowSlot::Pad)) {
            Some(o) => vec![wa + o], // slot o+1 is the first end Pad
            None => vec![wa + 2, wa + 3, wa + 4, wa + 7],
        },
        Some(s) => {
            if wa + s == 0 {
                vec![]
            } else {
                vec![wa + s - 1]
            }
        }
        None => vec![wa + 2, wa + 3, wa + 4, wa + 7],
    }
}

/// First-track knowledge about one tape cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Know {
    Free,
    Sym(WorkSym),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DigitKnow {
    Free,
    Val(u8),
}

/// A partially known configuration: tape cells plus a marker position.
#[derive(Debug, Clone)]
struct Frag {
    cells: Vec<Know>,
    digits: Vec<DigitKnow>,
    /// 1-based tape index the head scans; the marker sits at string
    /// position `marker`, i.e. immediately before tape cell `marker`.
    marker: usize,
    state: Option<(StateId, i8)>,
}

impl Frag {
    /// String position of the marker.
    fn marker_pos(&self) -> usize {
        self.marker.min(self.cells.len() + 1)
    }
}

/// Tries one hypothesis: window of the first configuration at absolute
/// string position `wa` (0 allowed for marker-centered windows at the
/// origin), marker at string position `m`.
fn try_hypo(spec: &MachineSpec, a: &Triple, b: &Triple, rel: &Rel, wa: usize, m: usize) -> bool {
    for end_a in end_candidates(a, wa) {
        if end_a < 1 || m > end_a {
            continue;
        }
        let Some(frag) = build_frag(a, wa, m, end_a) else {
            continue;
        };
        for t1 in &spec.transitions {
            if !filter_first(spec, &frag, rel, t1) {
                continue;
            }
            let Some(step1) = micro_step(spec, &frag, t1) else { continue };
            if rel.moves == 1 {
                if match_second(spec, b, rel, wa, &frag, &step1, 1) {
                    return true;
                }
            } else {
                for t2 in &spec.transitions {
                    if t2.from != step1.state.unwrap().0 || spec.is_halting(t2.from) {
                        continue;
                    }
                    let Some(step2) = micro_step(spec, &step1, t2) else { continue };
                    // Two increments run between the observed endpoints.
                    if match_second(spec, b, rel, wa, &frag, &step2, 2) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Builds the first configuration's fragment, validating the window content
/// against the hypothesis.
fn build_frag(a: &Triple, wa: usize, m: usize, end: usize) -> Option<Frag> {
    let mut cells = Vec::with_capacity(end);
    let mut digits = Vec::with_capacity(end);
    let mut state = None;
    for pos in 1..=end {
        match window_slot(a, wa, pos) {
            Some(WindowSlot::Sym(TapeSymbol::Head { state: s, dir })) => {
                if pos != m {
                    return None;
                }
                state = Some((s, dir));
            }
            Some(WindowSlot::Sym(TapeSymbol::Cell { sym, digit })) => {
                if pos == m {
                    return None;
                }
                cells.push(Know::Sym(sym));
                digits.push(DigitKnow::Val(digit.unwrap_or(0)));
            }
            Some(WindowSlot::Pad) => return None, // end candidates prevent this
            None => {
                if pos != m {
                    cells.push(Know::Free);
                    digits.push(DigitKnow::Free);
                }
            }
        }
    }
    // The marker may sit one past the last cell (scanning the implicit
    // blank), i.e. m == end means the marker is the final string symbol.
    let marker = if m > cells.len() { cells.len() + 1 } else { m };
    Some(Frag { cells, digits, marker, state })
}

fn filter_first(spec: &MachineSpec, frag: &Frag, rel: &Rel, t: &Transition) -> bool {
    if spec.is_halting(t.from) {
        return false;
    }
    if let Some((s, _)) = frag.state {
        if t.from != s {
            return false;
        }
    }
    if let Some(sigma) = rel.scanned {
        if t.input != sigma {
            return false;
        }
        if (sigma == InputSymbol::LeftEnd && t.d_input < 0)
            || (sigma == InputSymbol::RightEnd && t.d_input > 0)
        {
            return false;
        }
    }
    if let Some(choice) = rel.announced {
        if choice_index(spec, t) != Some(choice) {
            return false;
        }
    }
    true
}

/// Index of a transition among the declared choices sharing its key.
fn choice_index(spec: &MachineSpec, t: &Transition) -> Option<usize> {
    spec.choices(t.from, t.input, t.read)
        .find(|(_, cand)| std::ptr::eq(*cand, t))
        .map(|(i, _)| i)
}

/// Applies one transition symbolically; digits are not advanced here (the
/// carry chain is validated once, between the observed endpoints).
fn micro_step(spec: &MachineSpec, frag: &Frag, t: &Transition) -> Option<Frag> {
    let m = frag.marker;
    let scanned = frag.cells.get(m - 1).copied();
    match scanned {
        Some(Know::Sym(w)) if w != t.read => return None,
        None if t.read != spec.blank => return None,
        _ => {}
    }
    let new_head = m as isize + t.d_work as isize;
    if new_head < 1 {
        return None;
    }
    let mut cells = frag.cells.clone();
    let mut digits = frag.digits.clone();
    if cells.len() < m {
        cells.resize(m, Know::Sym(spec.blank));
        digits.resize(m, DigitKnow::Val(0));
    }
    cells[m - 1] = Know::Sym(t.write);
    Some(Frag { cells, digits, marker: new_head as usize, state: Some((t.to, t.d_input)) })
}

/// Matches the stepped fragment against the second window and validates the
/// digit carry chain.
fn match_second(
    spec: &MachineSpec,
    b: &Triple,
    rel: &Rel,
    wa: usize,
    before: &Frag,
    stepped: &Frag,
    increments: u8,
) -> bool {
    let instrumented = spec.counter.is_some();
    let mpos = stepped.marker_pos();
    let wb = if rel.same_position {
        wa
    } else {
        if !matches!(b[1], WindowSlot::Sym(TapeSymbol::Head { .. })) {
            return false;
        }
        mpos - 1 // slot 0 covers position mpos-1; 0 means boundary Pad
    };

    // One optional trailing cell appended by a carry that ran off the tape.
    for carry_append in [0usize, 1] {
        if carry_append == 1 && !instrumented {
            continue;
        }
        let tape_cells = stepped.cells.len() + carry_append;
        let string_len = tape_cells + 1;
        let append_idx = stepped.cells.len() + 1;

        let mut post_constraints: Vec<(usize, u8)> = Vec::new();
        let mut max_sym_pos = mpos;
        let mut min_pad_pos = usize::MAX;
        let mut ok = true;

        for off in 0..3usize {
            let pos = wb + off;
            let slot = b[off];
            if pos == 0 {
                if !matches!(slot, WindowSlot::Pad) {
                    ok = false;
                    break;
                }
                continue;
            }
            match slot {
                WindowSlot::Pad => min_pad_pos = min_pad_pos.min(pos),
                WindowSlot::Sym(TapeSymbol::Head { state, dir }) => {
                    if pos != mpos || pos > string_len {
                        ok = false;
                        break;
                    }
                    let Some((st, dr)) = stepped.state else {
                        ok = false;
                        break;
                    };
                    if state != st || dir != dr {
                        ok = false;
                        break;
                    }
                    max_sym_pos = max_sym_pos.max(pos);
                }
                WindowSlot::Sym(TapeSymbol::Cell { sym, digit }) => {
                    if pos > string_len || pos == mpos {
                        ok = false;
                        break;
                    }
                    let Some(idx) = cell_index(pos, mpos, tape_cells) else {
                        ok = false;
                        break;
                    };
                    if instrumented != digit.is_some() {
                        ok = false;
                        break;
                    }
                    if carry_append == 1 && idx == append_idx {
                        // Carry-appended cells are blank with digit 1.
                        if sym != spec.blank || digit != Some(1) {
                            ok = false;
                            break;
                        }
                    } else {
                        match stepped.cells[idx - 1] {
                            Know::Sym(w) if w != sym => {
                                ok = false;
                                break;
                            }
                            _ => {}
                        }
                        if instrumented {
                            post_constraints.push((idx, digit.unwrap_or(0)));
                        }
                    }
                    max_sym_pos = max_sym_pos.max(pos);
                }
            }
        }
        if !ok {
            continue;
        }

        // Trimming: the canonical second configuration keeps positions
        // 1..=T; Pads demand T < pad position, symbols demand T >= theirs.
        let tail_start = if min_pad_pos == usize::MAX {
            string_len + 1 // nothing trimmed away that we must justify
        } else {
            if min_pad_pos <= max_sym_pos {
                continue;
            }
            min_pad_pos
        };
        let mut trim_ok = true;
        for pos in tail_start..=string_len {
            if pos == mpos {
                trim_ok = false; // marker cannot be trimmed
                break;
            }
            let Some(idx) = cell_index(pos, mpos, tape_cells) else {
                trim_ok = false;
                break;
            };
            if carry_append == 1 && idx == append_idx {
                trim_ok = false; // appended digit is 1, never trimmable
                break;
            }
            if let Know::Sym(w) = stepped.cells[idx - 1] {
                if w != spec.blank {
                    trim_ok = false;
                    break;
                }
            }
            if instrumented {
                post_constraints.push((idx, 0));
            }
        }
        if !trim_ok {
            continue;
        }

        if !instrumented {
            return true;
        }
        if chain_valid(
            spec,
            &pre_digits_for(before, stepped),
            increments,
            stepped.cells.len(),
            carry_append == 1,
            &post_constraints,
        ) {
            return true;
        }
    }
    false
}

/// Tape index (1-based) of string position `pos` given the marker position.
fn cell_index(pos: usize, marker_pos: usize, tape_cells: usize) -> Option<usize> {
    if pos == marker_pos {
        return None;
    }
    let idx = if pos > marker_pos { pos - 1 } else { pos };
    (idx >= 1 && idx <= tape_cells).then_some(idx)
}

/// Pre-move digit knowledge aligned to the stepped tape (cells materialized
/// by the move enter with digit 0).
fn pre_digits_for(before: &Frag, stepped: &Frag) -> Vec<DigitKnow> {
    let mut pre = before.digits.clone();
    pre.resize(stepped.cells.len(), DigitKnow::Val(0));
    pre
}

/// Validates the little-endian carry chain: each increment enters tape cell
/// 1 with carry 1; a trailing append happens exactly when a carry leaves the
/// last cell.
fn chain_valid(
    spec: &MachineSpec,
    pre: &[DigitKnow],
    increments: u8,
    cells: usize,
    carry_append: bool,
    post_constraints: &[(usize, u8)],
) -> bool {
    let c_bits = spec.counter.map(|p| p.c).unwrap_or(1);
    let modulus: u16 = 1 << c_bits;
    let post_of = |idx: usize| -> Vec<u8> {
        post_constraints.iter().filter(|(i, _)| *i == idx).map(|(_, d)| *d).collect()
    };

    let mut states: Vec<(u8, u8)> = vec![(1, if increments == 2 { 1 } else { 0 })];
    for idx in 1..=cells {
        let needs = post_of(idx);
        let pre_vals: Vec<u16> = match pre.get(idx - 1).copied().unwrap_or(DigitKnow::Val(0)) {
            DigitKnow::Val(d) => vec![d as u16],
            DigitKnow::Free => (0..modulus).collect(),
        };
        let mut next: Vec<(u8, u8)> = Vec::new();
        for &(c1, c2) in &states {
            for &d0 in &pre_vals {
                let (d1, o1) = add_digit(d0, c1, modulus);
                let (d2, o2) =
                    if increments == 2 { add_digit(d1, c2, modulus) } else { (d1, 0) };
                if needs.iter().any(|&n| n as u16 != d2) {
                    continue;
                }
                if !next.contains(&(o1, o2)) {
                    next.push((o1, o2));
                }
            }
        }
        states = next;
        if states.is_empty() {
            return false;
        }
    }
    states.iter().any(|&(c1, c2)| {
        let leftover = c1 + c2;
        if carry_append {
            leftover == 1
        } else {
            leftover == 0
        }
    })
}

fn add_digit(d: u16, carry: u8, modulus: u16) -> (u16, u8) {
    if carry == 0 {
        (d, 0)
    } else if d + 1 == modulus {
        (0, 1)
    } else {
        (d + 1, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{
        initial_configuration, parse_machine, successors, window_at_head, Configuration,
    };

    fn demo() -> MachineSpec {
        parse_machine(
            "demo",
            "\
kind: nondeterministic
states: q0 q1 q2 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a b
work_alphabet: _ X Y
space_bound: linear 2
delta: q0 < _ -> q1 X +1 +1
delta: q0 < _ -> q2 Y 0 0
delta: q1 a _ -> q1 X +1 +1
delta: q1 a X -> qa X 0 0
delta: q1 b _ -> q2 Y 0 -1
delta: q2 a Y -> qa Y 0 0
",
        )
        .unwrap()
    }

    fn triples_at(a: &Configuration, b: &Configuration, idx: usize) -> (Triple, Triple) {
        let slot = |c: &Configuration, i: usize| -> WindowSlot {
            match c.syms.get(i - 1) {
                Some(&s) => WindowSlot::Sym(s),
                None => WindowSlot::Pad,
            }
        };
        (
            [slot(a, idx), slot(a, idx + 1), slot(a, idx + 2)],
            [slot(b, idx), slot(b, idx + 1), slot(b, idx + 2)],
        )
    }

    #[test]
    fn real_successor_pairs_pass_both_predicates() {
        let spec = demo();
        let init = initial_configuration(&spec);
        for s in successors(&spec, &init, InputSymbol::LeftEnd, None) {
            let w0 = window_at_head(&init);
            let w1 = window_at_head(&s.config);
            assert!(head_windows_consistent(&spec, &w0, &w1, InputSymbol::LeftEnd, Span::One, None));
            for idx in 1..=s.config.syms.len().max(init.syms.len()) {
                let (ta, tb) = triples_at(&init, &s.config, idx);
                assert!(
                    triple_pair_legitimate(&spec, &ta, &tb),
                    "index {idx}: {ta:?} vs {tb:?}"
                );
            }
        }
    }

    #[test]
    fn identical_marker_free_triples_are_legitimate() {
        let spec = demo();
        let x = WindowSlot::Sym(TapeSymbol::cell(WorkSym(1)));
        let t = [x, x, x];
        assert!(triple_pair_legitimate(&spec, &t, &t));
    }

    #[test]
    fn changed_inert_cell_is_illegitimate() {
        let spec = demo();
        let x = WindowSlot::Sym(TapeSymbol::cell(WorkSym(1)));
        let y = WindowSlot::Sym(TapeSymbol::cell(WorkSym(2)));
        // Middle cell changes with no marker near enough to explain it.
        assert!(!triple_pair_legitimate(&spec, &[x, x, x], &[x, y, x]));
    }

    #[test]
    fn accept_state_window_has_no_outgoing_explanation() {
        let spec = demo();
        let pad = WindowSlot::Pad;
        let acc = WindowSlot::Sym(TapeSymbol::Head { state: spec.accept, dir: 0 });
        let w = [pad, acc, pad];
        assert!(!head_windows_consistent(&spec, &w, &w, InputSymbol::Sym('a'), Span::One, None));
    }
}
