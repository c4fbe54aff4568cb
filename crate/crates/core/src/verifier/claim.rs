//! The two probabilistic sub-protocols: transition-error claim processing
//! and the endless-configuration check.
//!
//! Claim processing is a streaming coin experiment. While the first claimed
//! configuration streams, the verifier flips `4l` coins per symbol through
//! the `τ` mark plus `l` extra on it (the first accept set), storing the
//! three symbols from the mark on; the second configuration gets the same
//! treatment around `υ`. A control set of `2l` coins per marked cell runs
//! alongside. At `υ`: an all-zero accept set accepts outright; otherwise an
//! all-zero control set sends the stored triples to the alignment test;
//! otherwise everything is discarded and the debate continues. Coin sets
//! are tracked as single has-a-one flags, never as buffers.

use crate::debate::{Mode, PrivateSymbol, PublicSymbol};
use crate::machines::{triple_pair_spanned, MachineSpec, Span, TapeSymbol, Triple, WindowSlot};
use crate::rng::RandomSource;

/// What one claim step resolved to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimEvent {
    Progress,
    /// The opposing prover broke the claim grammar.
    SyntaxAccept,
    /// An accept set came up all zeros.
    AcceptByCoins,
    /// Control set all zeros: the triples were compared.
    Tested { legitimate: bool },
    /// All three sets had ones; state discarded.
    Continue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    /// Streaming the first claimed configuration.
    Alpha,
    /// Streaming the configuration(s) holding `υ`; `second` is set once a
    /// two-move span is in progress.
    Beta { second: bool },
    /// Coins decided on a test; finishing the second triple.
    Test { need: u8 },
}

/// Fixed-capacity triple buffer, padded with the delimiter on early close.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TripleBuf {
    slots: Triple,
    len: u8,
}

impl TripleBuf {
    fn new() -> Self {
        TripleBuf { slots: [WindowSlot::Pad; 3], len: 0 }
    }

    fn push(&mut self, s: TapeSymbol) {
        if self.len < 3 {
            self.slots[self.len as usize] = WindowSlot::Sym(s);
            self.len += 1;
        }
    }

    fn seal(&mut self) {
        self.len = 3;
    }

    fn full(&self) -> bool {
        self.len == 3
    }
}

/// One in-flight transition-error claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimRun {
    l: u32,
    mode: Mode,
    stage: Stage,
    saw_tau: bool,
    saw_ups: bool,
    a1_one: bool,
    a2_one: bool,
    ctrl_one: bool,
    triple_a: TripleBuf,
    triple_b: TripleBuf,
    /// Next tape symbol is the first of its configuration.
    first_cell: bool,
    j_is_one: bool,
    k_is_one: bool,
    span2: bool,
    announced: Option<u8>,
}

impl ClaimRun {
    /// Starts a claim; the opening `ς` sat on the `$` preceding the first
    /// claimed configuration.
    pub fn start(l: u32, mode: Mode) -> Self {
        ClaimRun {
            l,
            mode,
            stage: Stage::Alpha,
            saw_tau: false,
            saw_ups: false,
            a1_one: false,
            a2_one: false,
            ctrl_one: false,
            triple_a: TripleBuf::new(),
            triple_b: TripleBuf::new(),
            first_cell: true,
            j_is_one: false,
            k_is_one: false,
            span2: false,
            announced: None,
        }
    }

    /// Feeds one aligned symbol pair. `announce` carries a public choice
    /// announcement latched at this slot, `mark` the private symbol (zero
    /// when the slot held a public announcement).
    pub fn step(
        &mut self,
        spec: &MachineSpec,
        p1_sym: PublicSymbol,
        mark: PrivateSymbol,
        announce: Option<u8>,
        rng: &mut RandomSource,
    ) -> ClaimEvent {
        if let Some(c) = announce {
            self.announced = Some(c);
        }
        match self.stage {
            Stage::Alpha => self.step_alpha(p1_sym, mark, rng),
            Stage::Beta { .. } => self.step_beta(p1_sym, mark, rng),
            Stage::Test { .. } => self.step_test(spec, p1_sym, mark),
        }
    }

    fn flip(&mut self, rng: &mut RandomSource, accept_set: u8, extra: bool) {
        let coins = if extra { 4 * self.l + self.l } else { 4 * self.l };
        let hit = rng.any_one(coins);
        match accept_set {
            1 => self.a1_one |= hit,
            _ => self.a2_one |= hit,
        }
        self.ctrl_one |= rng.any_one(2 * self.l);
    }

    fn step_alpha(
        &mut self,
        p1_sym: PublicSymbol,
        mark: PrivateSymbol,
        rng: &mut RandomSource,
    ) -> ClaimEvent {
        match p1_sym {
            PublicSymbol::Delim => {
                if !self.saw_tau || mark != PrivateSymbol::Zero {
                    return ClaimEvent::SyntaxAccept;
                }
                self.triple_a.seal();
                self.stage = Stage::Beta { second: false };
                self.first_cell = true;
                ClaimEvent::Progress
            }
            PublicSymbol::RoundSep => ClaimEvent::SyntaxAccept,
            PublicSymbol::Tape(t) => {
                let event = match mark {
                    PrivateSymbol::Zero => {
                        if !self.saw_tau {
                            self.flip(rng, 1, false);
                        } else {
                            self.triple_a.push(t);
                        }
                        ClaimEvent::Progress
                    }
                    PrivateSymbol::Tau if !self.saw_tau => {
                        self.saw_tau = true;
                        self.j_is_one = self.first_cell;
                        self.flip(rng, 1, true);
                        self.triple_a.push(t);
                        ClaimEvent::Progress
                    }
                    _ => ClaimEvent::SyntaxAccept,
                };
                self.first_cell = false;
                event
            }
            PublicSymbol::Choice(_) => ClaimEvent::SyntaxAccept,
        }
    }

    fn step_beta(
        &mut self,
        p1_sym: PublicSymbol,
        mark: PrivateSymbol,
        rng: &mut RandomSource,
    ) -> ClaimEvent {
        let Stage::Beta { second } = self.stage else { unreachable!() };
        match p1_sym {
            PublicSymbol::Delim => {
                if mark != PrivateSymbol::Zero {
                    return ClaimEvent::SyntaxAccept;
                }
                // No `υ` yet: a one-move claim is abandoned; partial mode
                // may still place it two moves out.
                if !second && self.mode == Mode::PartialInfo {
                    self.stage = Stage::Beta { second: true };
                    self.first_cell = true;
                    ClaimEvent::Progress
                } else {
                    ClaimEvent::SyntaxAccept
                }
            }
            PublicSymbol::RoundSep => ClaimEvent::SyntaxAccept,
            PublicSymbol::Tape(t) => {
                let event = match mark {
                    PrivateSymbol::Zero => {
                        self.flip(rng, 2, false);
                        ClaimEvent::Progress
                    }
                    PrivateSymbol::Upsilon => {
                        self.saw_ups = true;
                        self.span2 = second;
                        self.k_is_one = self.first_cell;
                        self.flip(rng, 2, true);
                        self.triple_b.push(t);
                        if self.span2 && self.announced.is_none() {
                            // A two-move claim needs the intervening
                            // announcement to pin the universal move.
                            return ClaimEvent::SyntaxAccept;
                        }
                        if !self.a1_one || !self.a2_one {
                            return ClaimEvent::AcceptByCoins;
                        }
                        if !self.ctrl_one {
                            self.stage = Stage::Test { need: 2 };
                            return ClaimEvent::Progress;
                        }
                        ClaimEvent::Continue
                    }
                    _ => ClaimEvent::SyntaxAccept,
                };
                self.first_cell = false;
                event
            }
            PublicSymbol::Choice(_) => ClaimEvent::SyntaxAccept,
        }
    }

    fn step_test(
        &mut self,
        spec: &MachineSpec,
        p1_sym: PublicSymbol,
        mark: PrivateSymbol,
    ) -> ClaimEvent {
        if mark != PrivateSymbol::Zero {
            return ClaimEvent::SyntaxAccept;
        }
        let Stage::Test { need } = self.stage else { unreachable!() };
        match p1_sym {
            PublicSymbol::Delim | PublicSymbol::RoundSep => {
                self.triple_b.seal();
                self.evaluate(spec)
            }
            PublicSymbol::Tape(t) => {
                self.triple_b.push(t);
                if need == 1 || self.triple_b.full() {
                    self.evaluate(spec)
                } else {
                    self.stage = Stage::Test { need: need - 1 };
                    ClaimEvent::Progress
                }
            }
            PublicSymbol::Choice(_) => ClaimEvent::SyntaxAccept,
        }
    }

    fn evaluate(&self, spec: &MachineSpec) -> ClaimEvent {
        let span = if self.span2 {
            Span::Two { announced: self.announced.unwrap_or(0) as usize }
        } else {
            Span::One
        };
        let announced = match span {
            Span::Two { .. } => None,
            Span::One => self.announced.map(|c| c as usize),
        };
        let legitimate = triple_pair_spanned(
            spec,
            &self.triple_a.slots,
            &self.triple_b.slots,
            span,
            announced,
            self.j_is_one && self.k_is_one,
        );
        ClaimEvent::Tested { legitimate }
    }

    /// Fixed-width serialization for the constant-scratch contract.
    pub(crate) fn encode(&self, out: &mut Vec<u8>) {
        out.push(match self.stage {
            Stage::Alpha => 0,
            Stage::Beta { second: false } => 1,
            Stage::Beta { second: true } => 2,
            Stage::Test { need } => 3 + need,
        });
        for b in [
            self.saw_tau,
            self.saw_ups,
            self.a1_one,
            self.a2_one,
            self.ctrl_one,
            self.first_cell,
            self.j_is_one,
            self.k_is_one,
            self.span2,
        ] {
            out.push(b as u8);
        }
        out.push(self.announced.map(|c| c + 1).unwrap_or(0));
        encode_triple(&self.triple_a.slots, self.triple_a.len, out);
        encode_triple(&self.triple_b.slots, self.triple_b.len, out);
    }
}

pub(crate) fn encode_triple(t: &Triple, len: u8, out: &mut Vec<u8>) {
    out.push(len);
    for s in t {
        match s {
            WindowSlot::Pad => out.extend_from_slice(&[0, 0, 0, 0, 0, 0]),
            WindowSlot::Sym(TapeSymbol::Cell { sym, digit }) => {
                out.push(1);
                out.extend_from_slice(&sym.0.to_le_bytes());
                out.push(digit.map(|d| d + 1).unwrap_or(0));
                out.extend_from_slice(&[0, 0]);
            }
            WindowSlot::Sym(TapeSymbol::Head { state, dir }) => {
                out.push(2);
                out.extend_from_slice(&state.0.to_le_bytes());
                out.push((*dir + 1) as u8);
                out.extend_from_slice(&[0, 0]);
            }
        }
    }
}

/// Outcome of one endless-configuration check step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfEvent {
    Progress,
    Accept,
    Reject,
}

/// The endless-configuration check. The linear-regime check walks the input
/// head as a ruler over exactly `m*n` upcoming symbols looking for a `$`;
/// the superlinear check reads `n` symbols per iteration and rejects when a
/// batch of `r*n` coins comes up all zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinityRun {
    n: u32,
    /// Sweeps remaining (linear: `m` total; superlinear: reset each
    /// iteration).
    sweeps_left: u32,
    /// Cells left in the current sweep are realized by the input head; the
    /// simulation keeps the position here, outside the scratch contract.
    pos: u32,
    dir: i8,
    linear: bool,
    r: u32,
}

impl InfinityRun {
    pub fn linear(m: u32, n: usize) -> Self {
        InfinityRun { n: n as u32, sweeps_left: m, pos: 0, dir: 1, linear: true, r: 0 }
    }

    pub fn superlinear(r: u32, n: usize) -> Self {
        InfinityRun { n: n as u32, sweeps_left: 1, pos: 0, dir: 1, linear: false, r }
    }

    /// Consumes one symbol from the stream under inspection. The head walks
    /// one input cell per symbol, turning on the end-markers for free, so a
    /// sweep meters out exactly `n` symbols.
    pub fn step(&mut self, p1_sym: PublicSymbol, rng: &mut RandomSource) -> InfEvent {
        if p1_sym == PublicSymbol::Delim {
            return InfEvent::Accept;
        }
        let mut next = self.pos as i32 + self.dir as i32;
        if next <= 0 || next > self.n as i32 {
            // Step onto the marker and turn without consuming.
            self.dir = -self.dir;
            next = (next.clamp(0, self.n as i32 + 1) + self.dir as i32).clamp(1, self.n as i32);
        }
        self.pos = next as u32;
        // Sweep completed with this symbol?
        let at_sweep_end = (self.dir > 0 && self.pos == self.n)
            || (self.dir < 0 && self.pos == 1)
            || self.n == 1;
        if at_sweep_end {
            self.sweeps_left -= 1;
            if self.sweeps_left == 0 {
                if self.linear {
                    return InfEvent::Reject;
                }
                // Iteration boundary: all-zero coin batch rejects.
                if !rng.any_one_many(self.r as u64 * self.n as u64) {
                    return InfEvent::Reject;
                }
                self.sweeps_left = 1;
            }
        }
        InfEvent::Progress
    }

    pub(crate) fn encode(&self, out: &mut Vec<u8>) {
        out.push(self.linear as u8);
        out.push((self.dir + 1) as u8);
        out.extend_from_slice(&self.sweeps_left.to_le_bytes());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::parse_machine;

    fn toy() -> MachineSpec {
        parse_machine(
            "toy",
            "\
kind: nondeterministic
states: q0 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _ X
space_bound: linear 1
delta: q0 < _ -> qa X 0 0
",
        )
        .unwrap()
    }

    fn cell() -> PublicSymbol {
        PublicSymbol::Tape(TapeSymbol::cell(crate::machines::WorkSym(1)))
    }

    #[test]
    fn linear_infinity_check_rejects_after_exactly_m_n_symbols() {
        let mut run = InfinityRun::linear(3, 4);
        let mut rng = RandomSource::from_seed(0);
        for i in 0..(3 * 4 - 1) {
            assert_eq!(run.step(cell(), &mut rng), InfEvent::Progress, "symbol {i}");
        }
        assert_eq!(run.step(cell(), &mut rng), InfEvent::Reject);
    }

    #[test]
    fn linear_infinity_check_accepts_on_any_delimiter() {
        let mut run = InfinityRun::linear(2, 4);
        let mut rng = RandomSource::from_seed(0);
        assert_eq!(run.step(cell(), &mut rng), InfEvent::Progress);
        assert_eq!(run.step(PublicSymbol::Delim, &mut rng), InfEvent::Accept);
    }

    #[test]
    fn tau_before_sigma_grammar_is_rejected_by_claim() {
        let spec = toy();
        let mut rng = RandomSource::from_seed(1);
        let mut claim = ClaimRun::start(1, Mode::ZeroInfo);
        // A second sigma inside the claim is a syntax error.
        let ev = claim.step(&spec, cell(), PrivateSymbol::Sigma, None, &mut rng);
        assert_eq!(ev, ClaimEvent::SyntaxAccept);
    }

    #[test]
    fn upsilon_in_the_second_config_is_a_two_move_span_only_in_partial_mode(
    ) {
        let spec = toy();
        let mut rng = RandomSource::from_seed(1);
        for (mode, expect_syntax) in [(Mode::ZeroInfo, true), (Mode::PartialInfo, false)] {
            let mut claim = ClaimRun::start(1, mode);
            assert_eq!(
                claim.step(&spec, cell(), PrivateSymbol::Tau, None, &mut rng),
                ClaimEvent::Progress
            );
            assert_eq!(
                claim.step(&spec, PublicSymbol::Delim, PrivateSymbol::Zero, None, &mut rng),
                ClaimEvent::Progress
            );
            // First config after alpha passes with zeros only.
            assert_eq!(
                claim.step(&spec, cell(), PrivateSymbol::Zero, None, &mut rng),
                ClaimEvent::Progress
            );
            let ev = claim.step(&spec, PublicSymbol::Delim, PrivateSymbol::Zero, None, &mut rng);
            if expect_syntax {
                assert_eq!(ev, ClaimEvent::SyntaxAccept);
            } else {
                assert_eq!(ev, ClaimEvent::Progress);
            }
        }
    }
}
