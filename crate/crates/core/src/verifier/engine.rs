//! The streaming debate verifier.
//!
//! One engine drives all three protocol modes. Each protocol move consults
//! the membership prover's cell, then the opposing prover's, updates the
//! constant-size scratch, and applies the decision rules in their fixed
//! precedence: membership-prover syntax rejects, then the verifier's own
//! head-window check, then opposing-prover syntax accepts, then claim
//! processing, then the round-end rules. Restart mode appends one announced
//! coin per move; a zero resets the whole protocol.

use crate::debate::{
    Mode, P0Strategy, P0Symbol, P1Strategy, PrivateSymbol, PublicSymbol, Transcript,
};
use crate::machines::{
    game_value, generate_acp, head_windows_consistent, initial_configuration, input_tape,
    GameValue, InputSymbol, Kind, MachineSpec, Span, TapeSymbol, Triple, WindowSlot,
};
use crate::rng::RandomSource;
use thiserror::Error;

use super::claim::{encode_triple, ClaimEvent, ClaimRun, InfEvent, InfinityRun};
use super::params::ProtocolParams;

/// Terminal decision of one debate run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Decision {
    Accept,
    Reject,
    /// The step cap was reached first.
    Undecided,
}

/// Event counts useful for calibration and reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Tally {
    pub rounds_completed: u64,
    pub claims_started: u64,
    pub claim_accepts: u64,
    pub claim_tests: u64,
    pub test_accepts: u64,
    pub test_rejects: u64,
    pub claim_continues: u64,
    pub infinity_checks: u64,
    pub p1_syntax_rejects: u64,
    pub window_rejects: u64,
    pub p0_syntax_accepts: u64,
    pub round_end_accepts: u64,
    pub round_end_rejects: u64,
    pub restarts: u64,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        self.rounds_completed += other.rounds_completed;
        self.claims_started += other.claims_started;
        self.claim_accepts += other.claim_accepts;
        self.claim_tests += other.claim_tests;
        self.test_accepts += other.test_accepts;
        self.test_rejects += other.test_rejects;
        self.claim_continues += other.claim_continues;
        self.infinity_checks += other.infinity_checks;
        self.p1_syntax_rejects += other.p1_syntax_rejects;
        self.window_rejects += other.window_rejects;
        self.p0_syntax_accepts += other.p0_syntax_accepts;
        self.round_end_accepts += other.round_end_accepts;
        self.round_end_rejects += other.round_end_rejects;
        self.restarts += other.restarts;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub decision: Decision,
    pub steps: u64,
    pub tally: Tally,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("opposing prover emitted a public symbol in a zero-information debate")]
    P0AlphabetViolation,
    #[error("mode {0:?} needs a {1} machine")]
    ModeMachineMismatch(Mode, &'static str),
    #[error("setup failed: {0}")]
    Setup(String),
}

/// Window capture while one configuration streams by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Capture {
    /// No marker seen yet; holds the previous symbol for the left slot.
    Empty { last: WindowSlot },
    /// Marker seen; waiting for the right-slot symbol.
    Waiting { left: WindowSlot, marker: TapeSymbol },
    Done(Triple),
}

/// The verifier's constant-size working memory. Its serialized width never
/// depends on the input length or on elapsed steps; the input-head position
/// lives outside it, realized by the head itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierScratch {
    /// Endless-configuration check in progress.
    infinity: Option<InfinityRun>,
    claim: Option<ClaimRun>,
    capture: Capture,
    /// Completed previous configuration's head window.
    prev_window: Option<Triple>,
    /// Parity of completed configurations this round, plus whether at least
    /// one / at least two completed.
    configs_parity: bool,
    configs_ge2: bool,
    any_config: bool,
    in_config: bool,
    first_config: bool,
    /// Symbols seen in the current configuration (saturating).
    cur_len: u8,
    marker_count: u8,
    cur_accepting: bool,
    last_accepting: bool,
    round_had_claim: bool,
    /// Choice announced for the move into the currently streaming
    /// configuration, when that move is universal.
    pending_choice: Option<u8>,
    cur_is_universal: bool,
    /// Head-window pair check already fired for the current configuration.
    pair_checked: bool,
}

impl VerifierScratch {
    fn new() -> Self {
        VerifierScratch {
            infinity: None,
            claim: None,
            capture: Capture::Empty { last: WindowSlot::Pad },
            prev_window: None,
            configs_parity: false,
            configs_ge2: false,
            any_config: false,
            in_config: false,
            first_config: true,
            cur_len: 0,
            marker_count: 0,
            cur_accepting: false,
            last_accepting: false,
            round_had_claim: false,
            pending_choice: None,
            cur_is_universal: false,
            pair_checked: false,
        }
    }

    /// Fixed-width serialization; the constant-space contract is that this
    /// has identical length at every step of every run of a given machine.
    pub fn serialized(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(112);
        match &self.infinity {
            None => out.extend_from_slice(&[0; 7]),
            Some(inf) => {
                out.push(1);
                inf.encode(&mut out);
            }
        }
        match &self.claim {
            None => out.extend_from_slice(&[0; 50]),
            Some(c) => {
                out.push(1);
                c.encode(&mut out);
            }
        }
        match &self.capture {
            Capture::Empty { last } => {
                out.push(0);
                encode_slot(last, &mut out);
                encode_slot(&WindowSlot::Pad, &mut out);
            }
            Capture::Waiting { left, marker } => {
                out.push(1);
                encode_slot(left, &mut out);
                encode_slot(&WindowSlot::Sym(*marker), &mut out);
            }
            Capture::Done(t) => {
                out.push(2);
                encode_slot(&t[0], &mut out);
                encode_slot(&t[2], &mut out);
            }
        }
        match &self.prev_window {
            None => {
                out.push(0);
                encode_triple(&[WindowSlot::Pad; 3], 0, &mut out);
            }
            Some(t) => {
                out.push(1);
                encode_triple(t, 3, &mut out);
            }
        }
        for b in [
            self.configs_parity,
            self.configs_ge2,
            self.any_config,
            self.in_config,
            self.first_config,
            self.cur_accepting,
            self.last_accepting,
            self.round_had_claim,
            self.cur_is_universal,
            self.pair_checked,
        ] {
            out.push(b as u8);
        }
        out.push(self.cur_len);
        out.push(self.marker_count);
        out.push(self.pending_choice.map(|c| c + 1).unwrap_or(0));
        out
    }
}

fn encode_slot(s: &WindowSlot, out: &mut Vec<u8>) {
    match s {
        WindowSlot::Pad => out.extend_from_slice(&[0, 0, 0, 0]),
        WindowSlot::Sym(TapeSymbol::Cell { sym, digit }) => {
            out.push(1);
            out.extend_from_slice(&sym.0.to_le_bytes());
            out.push(digit.map(|d| d + 1).unwrap_or(0));
        }
        WindowSlot::Sym(TapeSymbol::Head { state, dir }) => {
            out.push(2);
            out.extend_from_slice(&state.0.to_le_bytes());
            out.push((*dir + 1) as u8);
        }
    }
}

/// A just-completed configuration pair awaiting the verifier's window check.
struct PendingPair {
    prev: Triple,
    cur: Triple,
    universal: bool,
    choice: Option<u8>,
}

/// Runs one debate to a decision or the step cap. The observer sees the
/// scratch and input-head position after every protocol move.
pub fn run_debate_observed<F: FnMut(&VerifierScratch, usize)>(
    spec: &MachineSpec,
    params: &ProtocolParams,
    input: &str,
    p1: &mut P1Strategy,
    p0: &mut P0Strategy,
    rng: &mut RandomSource,
    mut transcript: Option<&mut Transcript>,
    mut observer: F,
) -> Result<Outcome, RunError> {
    spec.check_input(input).map_err(|e| RunError::Setup(e.to_string()))?;
    let mut tally = Tally::default();

    // The empty input is decided before the protocol: no ruler exists for
    // the endless-configuration check.
    if input.is_empty() {
        let member = match spec.kind {
            Kind::Alternating => game_value(spec, input, 512)
                .map(|v| v == GameValue::Accept)
                .map_err(|e| RunError::Setup(e.to_string()))?,
            _ => generate_acp(spec, input, 4096, 1 << 20)
                .map_err(|e| RunError::Setup(e.to_string()))?
                .is_some(),
        };
        let decision = if member { Decision::Accept } else { Decision::Reject };
        return Ok(Outcome { decision, steps: 0, tally });
    }

    let tape = input_tape(input);
    let n = input.len();
    let mut scratch = VerifierScratch::new();
    let mut head: usize = 0;
    let mut steps: u64 = 0;
    let init_marker = initial_configuration(spec).syms[0];

    while steps < params.max_steps {
        let p1_sym = p1.next();
        p0.observe_p1(p1_sym);
        let p0_sym = p0.next();
        if let Some(t) = transcript.as_deref_mut() {
            t.push_p1(p1_sym);
            t.push_p0(p0_sym);
        }
        if let P0Symbol::Public(s) = p0_sym {
            p1.observe_p0(s);
        }
        steps += 1;

        let decision = step_move(
            spec,
            params,
            &tape,
            n,
            &init_marker,
            &mut scratch,
            &mut head,
            &mut tally,
            p1_sym,
            p0_sym,
            rng,
        )?;
        debug_assert!(head < tape.len(), "input head crossed an end-marker");
        observer(&scratch, head);
        if let Some(d) = decision {
            return Ok(Outcome { decision: d, steps, tally });
        }

        // Restart mode: announce one coin; zero restarts everything.
        if params.mode == Mode::Cips {
            let bit = rng.bit();
            if let Some(t) = transcript.as_deref_mut() {
                t.coins.push(bit);
            }
            p1.observe_coin(bit);
            p0.observe_coin(bit);
            if !bit {
                scratch = VerifierScratch::new();
                head = 0;
                tally.restarts += 1;
            }
        }
    }
    Ok(Outcome { decision: Decision::Undecided, steps, tally })
}

/// One protocol move. Returns a terminal decision when one fires.
#[allow(clippy::too_many_arguments)]
fn step_move(
    spec: &MachineSpec,
    params: &ProtocolParams,
    tape: &[InputSymbol],
    n: usize,
    init_marker: &TapeSymbol,
    s: &mut VerifierScratch,
    head: &mut usize,
    tally: &mut Tally,
    p1_sym: PublicSymbol,
    p0_sym: P0Symbol,
    rng: &mut RandomSource,
) -> Result<Option<Decision>, RunError> {
    // Endless-configuration resolution consumes the stream exclusively.
    if let Some(inf) = &mut s.infinity {
        return Ok(match inf.step(p1_sym, rng) {
            InfEvent::Progress => None,
            InfEvent::Accept => Some(Decision::Accept),
            InfEvent::Reject => Some(Decision::Reject),
        });
    }

    // ---- membership-prover syntax and window bookkeeping ----
    let mut announce_slot = false;
    let mut pair: Option<PendingPair> = None;
    match p1_sym {
        PublicSymbol::Choice(_) => {
            tally.p1_syntax_rejects += 1;
            return Ok(Some(Decision::Reject));
        }
        PublicSymbol::Tape(t) => {
            if !s.in_config {
                tally.p1_syntax_rejects += 1;
                return Ok(Some(Decision::Reject));
            }
            s.cur_len = s.cur_len.saturating_add(1);
            if s.first_config && (s.cur_len > 1 || t != *init_marker) {
                // The round must open with exactly the initial configuration.
                tally.p1_syntax_rejects += 1;
                return Ok(Some(Decision::Reject));
            }
            match (s.capture, t) {
                (Capture::Empty { last }, TapeSymbol::Head { state, dir }) => {
                    s.marker_count = s.marker_count.saturating_add(1);
                    s.cur_accepting = state == spec.accept;
                    s.capture =
                        Capture::Waiting { left: last, marker: TapeSymbol::Head { state, dir } };
                }
                (Capture::Empty { .. }, cell) => {
                    s.capture = Capture::Empty { last: WindowSlot::Sym(cell) };
                }
                (Capture::Waiting { .. }, TapeSymbol::Head { .. })
                | (Capture::Done(_), TapeSymbol::Head { .. }) => {
                    // Second marker in one configuration.
                    tally.p1_syntax_rejects += 1;
                    return Ok(Some(Decision::Reject));
                }
                (Capture::Waiting { left, marker }, cell) => {
                    s.capture =
                        Capture::Done([left, WindowSlot::Sym(marker), WindowSlot::Sym(cell)]);
                }
                (Capture::Done(_), _) => {}
            }
            if let Capture::Done(w) = s.capture {
                if !s.pair_checked {
                    s.pair_checked = true;
                    if let Some(prev) = s.prev_window {
                        pair = Some(PendingPair {
                            prev,
                            cur: w,
                            universal: s.cur_is_universal,
                            choice: s.pending_choice,
                        });
                    } else {
                        s.prev_window = Some(w);
                    }
                }
            }
        }
        PublicSymbol::Delim | PublicSymbol::RoundSep => {
            if s.in_config {
                if s.marker_count != 1 || s.cur_len == 0 {
                    tally.p1_syntax_rejects += 1;
                    return Ok(Some(Decision::Reject));
                }
                let w = match s.capture {
                    Capture::Done(t) => t,
                    Capture::Waiting { left, marker } => {
                        [left, WindowSlot::Sym(marker), WindowSlot::Pad]
                    }
                    Capture::Empty { .. } => unreachable!("marker_count == 1"),
                };
                if !s.pair_checked {
                    s.pair_checked = true;
                    if let Some(prev) = s.prev_window {
                        pair = Some(PendingPair {
                            prev,
                            cur: w,
                            universal: s.cur_is_universal,
                            choice: s.pending_choice,
                        });
                    }
                }
                s.prev_window = Some(w);
                s.last_accepting = s.cur_accepting;
                s.configs_parity = !s.configs_parity;
                if s.any_config && !s.configs_parity {
                    s.configs_ge2 = true;
                }
                s.any_config = true;
                s.first_config = false;
            }
            if p1_sym == PublicSymbol::Delim {
                // An announcement is due at the `$` closing each completed
                // pair of configurations.
                announce_slot = params.mode == Mode::PartialInfo
                    && s.configs_ge2
                    && !s.configs_parity;
                s.in_config = true;
                s.cur_len = 0;
                s.marker_count = 0;
                s.cur_accepting = false;
                s.capture = Capture::Empty { last: WindowSlot::Pad };
                s.pair_checked = false;
                s.cur_is_universal = announce_slot;
                if announce_slot {
                    s.pending_choice = None; // awaiting this slot's choice
                }
            }
        }
    }

    // ---- the verifier's own window check on the completed pair ----
    if let Some(p) = pair {
        let announced = if p.universal { p.choice.map(usize::from) } else { None };
        // In partial mode a universal move must exist and match the
        // announced choice; a missing announcement pins choice 0.
        let announced = if p.universal { Some(announced.unwrap_or(0)) } else { None };
        let sigma = tape[*head];
        if !head_windows_consistent(spec, &p.prev, &p.cur, sigma, Span::One, announced) {
            tally.window_rejects += 1;
            return Ok(Some(Decision::Reject));
        }
        s.prev_window = Some(p.cur);
        if let WindowSlot::Sym(TapeSymbol::Head { dir, .. }) = p.cur[1] {
            let nh = *head as isize + dir as isize;
            if nh < 0 || nh as usize >= tape.len() {
                // A stream driving the head past an end-marker is not a
                // legitimate run of the machine.
                tally.window_rejects += 1;
                return Ok(Some(Decision::Reject));
            }
            *head = nh as usize;
        }
    }

    // ---- opposing-prover slot rules ----
    let mark: PrivateSymbol = match p0_sym {
        P0Symbol::Public(sym) => match params.mode {
            Mode::ZeroInfo | Mode::Cips => return Err(RunError::P0AlphabetViolation),
            Mode::PartialInfo => {
                let PublicSymbol::Choice(c) = sym else {
                    tally.p0_syntax_accepts += 1;
                    return Ok(Some(Decision::Accept));
                };
                if !announce_slot {
                    tally.p0_syntax_accepts += 1;
                    return Ok(Some(Decision::Accept));
                }
                s.pending_choice = Some(c);
                if let Some(claim) = &mut s.claim {
                    let ev = claim.step(spec, p1_sym, PrivateSymbol::Zero, Some(c), rng);
                    if let Some(d) = handle_claim_event(s, tally, ev) {
                        return Ok(Some(d));
                    }
                }
                return finish_move(s, head, tally, p1_sym);
            }
        },
        P0Symbol::Private(m) => m,
    };
    if announce_slot {
        // A private marker where a public choice announcement is due.
        tally.p0_syntax_accepts += 1;
        return Ok(Some(Decision::Accept));
    }

    // ---- claim processing and claim grammar ----
    if s.claim.is_some() {
        let ev = {
            let claim = s.claim.as_mut().unwrap();
            claim.step(spec, p1_sym, mark, None, rng)
        };
        if let Some(d) = handle_claim_event(s, tally, ev) {
            return Ok(Some(d));
        }
    } else {
        match mark {
            PrivateSymbol::Zero => {}
            PrivateSymbol::Sigma => {
                if p1_sym != PublicSymbol::Delim {
                    tally.p0_syntax_accepts += 1;
                    return Ok(Some(Decision::Accept));
                }
                tally.claims_started += 1;
                s.round_had_claim = true;
                s.claim = Some(ClaimRun::start(params.l, params.mode));
            }
            PrivateSymbol::Infinity => {
                if p1_sym != PublicSymbol::Delim || params.mode == Mode::Cips {
                    tally.p0_syntax_accepts += 1;
                    return Ok(Some(Decision::Accept));
                }
                tally.infinity_checks += 1;
                s.round_had_claim = true;
                s.infinity = Some(if spec.linear_regime() {
                    InfinityRun::linear(params.m, n)
                } else {
                    InfinityRun::superlinear(params.r, n)
                });
            }
            PrivateSymbol::Tau | PrivateSymbol::Upsilon => {
                tally.p0_syntax_accepts += 1;
                return Ok(Some(Decision::Accept));
            }
        }
    }

    finish_move(s, head, tally, p1_sym)
}

/// Round-end rules, applied after the move's other triggers.
fn finish_move(
    s: &mut VerifierScratch,
    head: &mut usize,
    tally: &mut Tally,
    p1_sym: PublicSymbol,
) -> Result<Option<Decision>, RunError> {
    if p1_sym != PublicSymbol::RoundSep {
        return Ok(None);
    }
    if s.claim.is_some() {
        // The opposing prover abandoned its claim mid-round.
        tally.p0_syntax_accepts += 1;
        return Ok(Some(Decision::Accept));
    }
    if !s.any_config || !s.last_accepting {
        tally.round_end_rejects += 1;
        return Ok(Some(Decision::Reject));
    }
    if !s.round_had_claim {
        tally.round_end_accepts += 1;
        return Ok(Some(Decision::Accept));
    }
    tally.rounds_completed += 1;
    // Each round presents a fresh computation from the initial
    // configuration, so the traced input head rewinds to the left
    // end-marker (in the verifier's own non-reading moves).
    *s = VerifierScratch::new();
    *head = 0;
    Ok(None)
}

fn handle_claim_event(
    s: &mut VerifierScratch,
    tally: &mut Tally,
    ev: ClaimEvent,
) -> Option<Decision> {
    match ev {
        ClaimEvent::Progress => None,
        ClaimEvent::SyntaxAccept => {
            tally.p0_syntax_accepts += 1;
            Some(Decision::Accept)
        }
        ClaimEvent::AcceptByCoins => {
            tally.claim_accepts += 1;
            Some(Decision::Accept)
        }
        ClaimEvent::Tested { legitimate } => {
            tally.claim_tests += 1;
            if legitimate {
                tally.test_accepts += 1;
                Some(Decision::Accept)
            } else {
                tally.test_rejects += 1;
                Some(Decision::Reject)
            }
        }
        ClaimEvent::Continue => {
            tally.claim_continues += 1;
            s.claim = None;
            None
        }
    }
}

/// Zero-information debate.
pub fn run_debate(
    spec: &MachineSpec,
    params: &ProtocolParams,
    input: &str,
    p1: &mut P1Strategy,
    p0: &mut P0Strategy,
    rng: &mut RandomSource,
) -> Result<Outcome, RunError> {
    run_debate_observed(spec, params, input, p1, p0, rng, None, |_, _| {})
}

/// Partial-information debate over an alternating machine.
pub fn run_partial_info(
    spec: &MachineSpec,
    params: &ProtocolParams,
    input: &str,
    p1: &mut P1Strategy,
    p0: &mut P0Strategy,
    rng: &mut RandomSource,
) -> Result<Outcome, RunError> {
    if spec.kind != Kind::Alternating {
        return Err(RunError::ModeMachineMismatch(params.mode, "alternating"));
    }
    run_debate_observed(spec, params, input, p1, p0, rng, None, |_, _| {})
}

/// Restart-mode debate over a deterministic machine.
pub fn run_cips(
    spec: &MachineSpec,
    params: &ProtocolParams,
    input: &str,
    p1: &mut P1Strategy,
    p0: &mut P0Strategy,
    rng: &mut RandomSource,
) -> Result<Outcome, RunError> {
    if spec.kind != Kind::Deterministic {
        return Err(RunError::ModeMachineMismatch(params.mode, "deterministic"));
    }
    run_debate_observed(spec, params, input, p1, p0, rng, None, |_, _| {})
}
