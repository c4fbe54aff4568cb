//! Prover strategies.
//!
//! Strategies are deterministic and replay-stable: a fresh clone fed the
//! same observations emits the same symbols. The membership prover never
//! receives private symbols at all, which realizes the asymmetric
//! visibility rule structurally.
//!
//! Zero-information and restart-mode strategies compile to round tapes.
//! Partial-information membership provers are reactive (they must answer
//! the opponent's public choice announcements); opposing provers are always
//! tape-backed, built by co-simulating the membership prover's rounds
//! together with the opposing prover's own announcement policy.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use super::alphabet::PublicSymbol;
use crate::machines::{
    accepting_strategy_tree, generate_acp, initial_configuration, stall_fabrication, AcpError,
    Configuration, InputSymbol, Kind, MachineSpec, StrategyTree, TapeSymbol,
};

/// Protocol mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    ZeroInfo,
    PartialInfo,
    Cips,
}

/// Search limits used while constructing strategies.
pub const ACP_MAX_STEPS: usize = 4096;
pub const ACP_NODE_BUDGET: usize = 1 << 20;
pub const GAME_DEPTH: usize = 512;
/// Rounds simulated before concluding the stream cycles.
pub const SIM_MAX_ROUNDS: usize = 64;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("honest membership prover is undefined for a non-member input")]
    NotMember,
    #[error("strategy parameters do not fit this stream: {0}")]
    NoSite(String),
    #[error(transparent)]
    Acp(#[from] AcpError),
    #[error("game evaluation failed: {0}")]
    Game(String),
    #[error("mode {0:?} is incompatible with this machine or strategy")]
    BadMode(Mode),
}

/// One round of a prover tape. `tail` makes the round endless: after the
/// prefix the symbol repeats forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTape {
    pub syms: Vec<PublicSymbol>,
    pub tail: Option<PublicSymbol>,
}

/// A membership-prover strategy.
#[derive(Clone)]
pub enum P1Strategy {
    Tape(TapeP1),
    Partial(PartialP1),
}

impl P1Strategy {
    pub fn next(&mut self) -> PublicSymbol {
        match self {
            P1Strategy::Tape(t) => t.next(),
            P1Strategy::Partial(p) => p.next(),
        }
    }

    /// Feed a public opponent symbol (choice announcements).
    pub fn observe_p0(&mut self, sym: PublicSymbol) {
        match self {
            P1Strategy::Tape(_) => {}
            P1Strategy::Partial(p) => p.observe_p0(sym),
        }
    }

    /// Feed a verifier coin announcement; 0 restarts the protocol.
    pub fn observe_coin(&mut self, bit: bool) {
        if !bit {
            match self {
                P1Strategy::Tape(t) => t.reset(),
                P1Strategy::Partial(p) => p.reset(),
            }
        }
    }

    pub fn label(&self) -> &str {
        match self {
            P1Strategy::Tape(t) => &t.label,
            P1Strategy::Partial(p) => &p.label,
        }
    }
}

/// Tape-backed membership prover: a prelude of rounds, then a cycle.
#[derive(Clone)]
pub struct TapeP1 {
    pub rounds: Arc<Vec<RoundTape>>,
    pub cycle_start: usize,
    pub label: Arc<str>,
    round: usize,
    pos: usize,
}

impl TapeP1 {
    pub fn new(rounds: Vec<RoundTape>, cycle_start: usize, label: impl Into<Arc<str>>) -> Self {
        assert!(!rounds.is_empty() && cycle_start < rounds.len());
        TapeP1 { rounds: Arc::new(rounds), cycle_start, label: label.into(), round: 0, pos: 0 }
    }

    fn next(&mut self) -> PublicSymbol {
        let tape = &self.rounds[self.round];
        if self.pos < tape.syms.len() {
            let s = tape.syms[self.pos];
            self.pos += 1;
            if self.pos == tape.syms.len() && tape.tail.is_none() {
                self.round = if self.round + 1 < self.rounds.len() {
                    self.round + 1
                } else {
                    self.cycle_start
                };
                self.pos = 0;
            }
            s
        } else {
            tape.tail.expect("tape exhausted without tail")
        }
    }

    fn reset(&mut self) {
        self.round = 0;
        self.pos = 0;
    }
}

/// Symbols of one configuration, delimiter not included.
fn config_syms(c: &Configuration) -> Vec<PublicSymbol> {
    c.syms.iter().map(|&s| PublicSymbol::Tape(s)).collect()
}

/// The honest round: `$ c1 $ c2 ... $ cm #` for the shortest accepting
/// computation path.
pub fn honest_round(spec: &MachineSpec, input: &str) -> Result<RoundTape, StrategyError> {
    let path = generate_acp(spec, input, ACP_MAX_STEPS, ACP_NODE_BUDGET)?
        .ok_or(StrategyError::NotMember)?;
    Ok(round_from_path(&path))
}

fn round_from_path(path: &[Configuration]) -> RoundTape {
    let mut syms = Vec::new();
    for c in path {
        syms.push(PublicSymbol::Delim);
        syms.extend(config_syms(c));
    }
    syms.push(PublicSymbol::RoundSep);
    RoundTape { syms, tail: None }
}

/// Zero-information / restart-mode honest membership prover.
pub fn honest_p1_tape(spec: &MachineSpec, input: &str) -> Result<TapeP1, StrategyError> {
    Ok(TapeP1::new(vec![honest_round(spec, input)?], 0, "honest"))
}

/// Partial-information honest membership prover: walks the accepting
/// strategy tree, answering announced universal choices.
#[derive(Clone)]
pub struct PartialP1 {
    spec: Arc<MachineSpec>,
    tree: Option<Arc<StrategyTree>>,
    cheat: PartialCheat,
    pub label: Arc<str>,
    buf: VecDeque<PublicSymbol>,
    /// Set while the prover has emitted the announce `$` and waits for the
    /// opponent's public choice.
    awaiting: Option<StrategyTree>,
    prev_cfg: Option<Configuration>,
    round: usize,
    stalled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialCheat {
    None,
    WrongInitial,
    /// Deviate from the first differing announced choice in this round.
    HeadError { round: usize },
    /// Jump to a fabricated accepting configuration in this round.
    EarlyAccept { round: usize },
    /// Freeze the counter track once (instrumented machines).
    FarCell { round: usize },
}

impl PartialP1 {
    pub fn build(
        spec: &MachineSpec,
        input: &str,
        cheat: PartialCheat,
        label: impl Into<Arc<str>>,
    ) -> Result<Self, StrategyError> {
        if spec.kind != Kind::Alternating {
            return Err(StrategyError::BadMode(Mode::PartialInfo));
        }
        let tree = match accepting_strategy_tree(spec, input, GAME_DEPTH) {
            Ok(t) => t,
            Err(e) => return Err(StrategyError::Game(e.to_string())),
        };
        if tree.is_none() && cheat == PartialCheat::None {
            return Err(StrategyError::NotMember);
        }
        if matches!(cheat, PartialCheat::FarCell { .. }) && spec.counter.is_none() {
            return Err(StrategyError::NoSite("far-cell stalls need a counter track".into()));
        }
        let mut p = PartialP1 {
            spec: Arc::new(spec.clone()),
            tree: tree.map(Arc::new),
            cheat,
            label: label.into(),
            buf: VecDeque::new(),
            awaiting: None,
            prev_cfg: None,
            round: 0,
            stalled: false,
        };
        p.start_round();
        Ok(p)
    }

    fn reset(&mut self) {
        self.buf.clear();
        self.awaiting = None;
        self.prev_cfg = None;
        self.round = 0;
        self.stalled = false;
        self.start_round();
    }

    fn cheating_now(&self) -> bool {
        match self.cheat {
            PartialCheat::None => false,
            PartialCheat::WrongInitial => true,
            PartialCheat::HeadError { round }
            | PartialCheat::EarlyAccept { round }
            | PartialCheat::FarCell { round } => self.round + 1 >= round,
        }
    }

    fn push_config(&mut self, cfg: &Configuration) {
        let mut shown = cfg.clone();
        if matches!(self.cheat, PartialCheat::FarCell { .. })
            && self.cheating_now()
            && !self.stalled
        {
            if let Some(prev) = &self.prev_cfg {
                if prev.marker_pos() + 1 >= 3 && cfg.marker_pos() + 1 >= 3 {
                    if let Some(st) = freeze_digits(prev, cfg, &self.spec) {
                        shown = st;
                        self.stalled = true;
                    }
                }
            }
        }
        self.buf.extend(config_syms(&shown));
        self.prev_cfg = Some(shown);
    }

    /// Queues the start of a round: `$ c1 $ c2`, then either `#`, or the
    /// announce `$` with the walker waiting.
    fn start_round(&mut self) {
        let init = initial_configuration(&self.spec);
        self.buf.push_back(PublicSymbol::Delim);
        if self.cheat == PartialCheat::WrongInitial {
            self.buf.push_back(PublicSymbol::Tape(TapeSymbol::Head {
                state: self.spec.start,
                dir: 1,
            }));
        } else {
            self.buf.extend(config_syms(&init));
        }
        self.prev_cfg = Some(init);

        let Some(tree) = self.tree.clone() else {
            // No winning line: claim an immediate fabricated accept.
            self.buf.push_back(PublicSymbol::Delim);
            self.buf.push_back(PublicSymbol::Tape(TapeSymbol::Head {
                state: self.spec.accept,
                dir: 0,
            }));
            self.buf.push_back(PublicSymbol::RoundSep);
            self.round += 1;
            return;
        };
        let StrategyTree::Exist { config, next, .. } = tree.as_ref() else {
            // Start state is existential by validation; a bare Accepting
            // root means the initial configuration accepts.
            self.buf.push_back(PublicSymbol::RoundSep);
            self.round += 1;
            return;
        };
        self.buf.push_back(PublicSymbol::Delim);
        self.push_config(&config.clone());
        self.continue_from((**next).clone());
    }

    /// Emits what follows a just-queued configuration.
    fn continue_from(&mut self, node: StrategyTree) {
        match node {
            StrategyTree::Accepting => {
                self.buf.push_back(PublicSymbol::RoundSep);
                self.round += 1;
                self.awaiting = None;
                self.start_round_later();
            }
            StrategyTree::Univ { .. } => {
                if matches!(self.cheat, PartialCheat::EarlyAccept { .. }) && self.cheating_now() {
                    self.buf.push_back(PublicSymbol::Delim);
                    self.buf.push_back(PublicSymbol::Tape(TapeSymbol::Head {
                        state: self.spec.accept,
                        dir: bad_accept_dir(&self.spec),
                    }));
                    self.buf.push_back(PublicSymbol::RoundSep);
                    self.round += 1;
                    self.awaiting = None;
                    self.start_round_later();
                    return;
                }
                self.buf.push_back(PublicSymbol::Delim);
                self.awaiting = Some(node);
            }
            StrategyTree::Exist { config, next, .. } => {
                self.buf.push_back(PublicSymbol::Delim);
                self.push_config(&config);
                self.continue_from(*next);
            }
        }
    }

    /// A round just ended; queue nothing yet, the next round starts lazily.
    fn start_round_later(&mut self) {}

    fn next(&mut self) -> PublicSymbol {
        if self.buf.is_empty() {
            if self.awaiting.is_some() {
                // The opponent failed to announce; the verifier has already
                // accepted by now. Emit a harmless filler.
                return PublicSymbol::Delim;
            }
            self.start_round();
        }
        self.buf.pop_front().expect("round construction queued symbols")
    }

    fn observe_p0(&mut self, sym: PublicSymbol) {
        let Some(StrategyTree::Univ { branches }) = self.awaiting.take() else {
            return;
        };
        let PublicSymbol::Choice(c) = sym else {
            self.awaiting = Some(StrategyTree::Univ { branches });
            return;
        };
        let mut chosen = c as usize;
        if matches!(self.cheat, PartialCheat::HeadError { .. }) && self.cheating_now() {
            // Deviate: apply the opposite universal choice when it differs.
            let alt = 1 - chosen.min(1);
            if branches.iter().any(|(i, cfg, _)| {
                *i == alt && Some(cfg) != branches.iter().find(|(j, ..)| *j == chosen).map(|(_, c, _)| c)
            }) {
                chosen = alt;
            }
        }
        let branch = branches
            .iter()
            .find(|(i, ..)| *i == chosen)
            .or_else(|| branches.first())
            .cloned();
        let Some((_, cfg, sub)) = branch else {
            return;
        };
        self.push_config(&cfg);
        self.continue_from(*sub);
    }
}

/// An input-head direction for a fabricated accepting marker that no real
/// transition into the accept state uses, when one exists.
fn bad_accept_dir(spec: &MachineSpec) -> i8 {
    for d in [0i8, 1, -1] {
        if !spec.transitions.iter().any(|t| t.to == spec.accept && t.d_input == d) {
            return d;
        }
    }
    0
}

/// Presents `next` with the counter track copied from `prev` (one stalled
/// increment), re-canonicalized; `None` when the copy is not well formed.
pub(crate) fn freeze_digits(
    prev: &Configuration,
    next: &Configuration,
    spec: &MachineSpec,
) -> Option<Configuration> {
    let old: Vec<Option<u8>> = prev.cells().map(|(_, d)| d).collect();
    let mut idx = 0usize;
    let mut syms = Vec::with_capacity(next.syms.len());
    for s in &next.syms {
        match *s {
            TapeSymbol::Cell { sym, .. } => {
                let digit = old.get(idx).copied().flatten().unwrap_or(0);
                syms.push(TapeSymbol::Cell { sym, digit: Some(digit) });
                idx += 1;
            }
            h => syms.push(h),
        }
    }
    let mut cfg = Configuration { syms };
    while cfg.syms.len() > 1 {
        match *cfg.syms.last().unwrap() {
            TapeSymbol::Cell { sym, digit } if sym == spec.blank && digit.unwrap_or(0) == 0 => {
                cfg.syms.pop();
            }
            _ => break,
        }
    }
    (cfg.well_formed() && &cfg != next).then_some(cfg)
}

/// Builds the zero-information / restart-mode cheating tapes.
pub mod tapes {
    use super::*;

    /// Far-cell error. Members: the honest stream with one cell mutated
    /// away from the head from the given round on. Non-members: a
    /// budget-stall fabrication whose every defect sits at cell index 1
    /// (`index` must be 1 and `round` must be 1).
    pub fn far_cell_error(
        spec: &MachineSpec,
        input: &str,
        round: usize,
        index: usize,
    ) -> Result<TapeP1, StrategyError> {
        if round == 0 {
            return Err(StrategyError::NoSite("rounds are 1-based".into()));
        }
        let label: Arc<str> = format!("far-cell-error:round={round},index={index}").into();
        match generate_acp(spec, input, ACP_MAX_STEPS, ACP_NODE_BUDGET)? {
            Some(path) => {
                let mutated = mutate_far_cell(spec, &path, index)?;
                let honest = round_from_path(&path);
                let mut rounds = vec![honest; round - 1];
                rounds.push(round_from_path(&mutated));
                Ok(TapeP1::new(rounds, round - 1, label))
            }
            None => {
                if round != 1 || index != 1 {
                    return Err(StrategyError::NoSite(
                        "non-member fabrication pins round=1, index=1".into(),
                    ));
                }
                let plan = stall_fabrication(spec, input, ACP_MAX_STEPS, ACP_NODE_BUDGET)?;
                Ok(TapeP1::new(vec![round_from_path(&plan.path)], 0, label))
            }
        }
    }

    /// Replaces one far-from-head cell of one configuration; the stream
    /// differs from the honest one in exactly one symbol per round.
    fn mutate_far_cell(
        spec: &MachineSpec,
        path: &[Configuration],
        index: usize,
    ) -> Result<Vec<Configuration>, StrategyError> {
        for (t, cfg) in path.iter().enumerate() {
            if index > cfg.syms.len() {
                continue;
            }
            let marker = cfg.marker_pos() + 1; // 1-based string position
            if marker.abs_diff(index) < 2 {
                continue;
            }
            let TapeSymbol::Cell { sym, digit } = cfg.syms[index - 1] else {
                continue;
            };
            // Prefer a counter-digit flip (purely far-track evidence);
            // otherwise swap the work symbol.
            let replacement = match digit {
                Some(d) => TapeSymbol::Cell { sym, digit: Some(d ^ 1) },
                None => {
                    let alt = (0..spec.work_alphabet.len() as u16)
                        .find(|&w| w != sym.0)
                        .map(crate::machines::WorkSym);
                    match alt {
                        Some(w) => TapeSymbol::Cell { sym: w, digit },
                        None => continue,
                    }
                }
            };
            let mut out = path.to_vec();
            out[t].syms[index - 1] = replacement;
            if !out[t].well_formed() {
                continue;
            }
            return Ok(out);
        }
        Err(StrategyError::NoSite(format!("no far cell at index {index}")))
    }

    /// Invalid head window: after the honest prefix (or just the initial
    /// configuration), a follow-up configuration no transition explains.
    pub fn head_error(
        spec: &MachineSpec,
        input: &str,
        round: usize,
    ) -> Result<TapeP1, StrategyError> {
        let label: Arc<str> = format!("head-error:round={round}").into();
        let init = initial_configuration(spec);
        let broken = impossible_follow_up(spec, &init)?;
        let cheat = round_from_path(&[init, broken]);
        let mut rounds = Vec::new();
        if round > 1 {
            rounds.extend(std::iter::repeat_n(honest_round(spec, input)?, round - 1));
        }
        rounds.push(cheat);
        Ok(TapeP1::new(rounds, round.max(1) - 1, label))
    }

    /// Some configuration that is not one move from `from` and visibly
    /// breaks the head-window check.
    fn impossible_follow_up(
        spec: &MachineSpec,
        from: &Configuration,
    ) -> Result<Configuration, StrategyError> {
        use crate::machines::{head_windows_consistent, window_at_head, Span};
        let w0 = window_at_head(from);
        for state in 0..spec.state_names.len() as u16 {
            for dir in [0i8, 1, -1] {
                let cand = Configuration {
                    syms: vec![TapeSymbol::Head { state: crate::machines::StateId(state), dir }],
                };
                let consistent = [InputSymbol::LeftEnd, InputSymbol::RightEnd]
                    .into_iter()
                    .chain(spec.input_alphabet.iter().map(|&c| InputSymbol::Sym(c)))
                    .any(|sigma| {
                        head_windows_consistent(
                            spec,
                            &w0,
                            &window_at_head(&cand),
                            sigma,
                            Span::One,
                            None,
                        )
                    });
                if !consistent {
                    return Ok(cand);
                }
            }
        }
        Err(StrategyError::NoSite("every follow-up window is consistent".into()))
    }

    /// Never closes a configuration from the given round on.
    pub fn endless_config(
        spec: &MachineSpec,
        input: &str,
        round: usize,
    ) -> Result<TapeP1, StrategyError> {
        let label: Arc<str> = format!("endless-config:round={round}").into();
        let filler = spec
            .work_alphabet
            .iter()
            .enumerate()
            .find(|(i, _)| crate::machines::WorkSym(*i as u16) != spec.blank)
            .map(|(i, _)| crate::machines::WorkSym(i as u16))
            .unwrap_or(spec.blank);
        let digit = spec.counter.map(|_| 0u8);
        let init = initial_configuration(spec);
        let mut syms = vec![PublicSymbol::Delim];
        syms.extend(config_syms(&init));
        syms.push(PublicSymbol::Delim);
        let cheat = RoundTape {
            syms,
            tail: Some(PublicSymbol::Tape(TapeSymbol::Cell { sym: filler, digit })),
        };
        let mut rounds = Vec::new();
        if round > 1 {
            rounds.extend(std::iter::repeat_n(honest_round(spec, input)?, round - 1));
        }
        rounds.push(cheat);
        Ok(TapeP1::new(rounds, round.max(1) - 1, label))
    }

    /// Starts every round with an incorrect initial configuration.
    pub fn wrong_initial(spec: &MachineSpec) -> Result<TapeP1, StrategyError> {
        let bad = Configuration { syms: vec![TapeSymbol::Head { state: spec.start, dir: 1 }] };
        Ok(TapeP1::new(vec![round_from_path(&[bad])], 0, "wrong-initial"))
    }

    /// Skips from the honest prefix straight to a fabricated accepting
    /// configuration.
    pub fn early_accept(
        spec: &MachineSpec,
        input: &str,
        round: usize,
    ) -> Result<TapeP1, StrategyError> {
        let label: Arc<str> = format!("early-accept:round={round}").into();
        let init = initial_configuration(spec);
        let fake = Configuration {
            syms: vec![TapeSymbol::Head { state: spec.accept, dir: bad_accept_dir(spec) }],
        };
        let cheat = round_from_path(&[init, fake]);
        let mut rounds = Vec::new();
        if round > 1 {
            rounds.extend(std::iter::repeat_n(honest_round(spec, input)?, round - 1));
        }
        rounds.push(cheat);
        Ok(TapeP1::new(rounds, round.max(1) - 1, label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::parse_machine;

    fn one_move() -> MachineSpec {
        parse_machine(
            "one-move",
            "\
kind: nondeterministic
states: q0 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _
space_bound: linear 1
delta: q0 < _ -> qa _ +1 0
",
        )
        .unwrap()
    }

    #[test]
    fn honest_tape_loops_the_acp_with_round_separators() {
        let spec = one_move();
        let mut p1 = honest_p1_tape(&spec, "a").unwrap();
        let syms: Vec<PublicSymbol> = (0..10).map(|_| p1.next()).collect();
        // $ [q0.] $ [qa+] # repeated.
        assert_eq!(syms[0], PublicSymbol::Delim);
        assert!(matches!(syms[1], PublicSymbol::Tape(TapeSymbol::Head { dir: 0, .. })));
        assert_eq!(syms[2], PublicSymbol::Delim);
        assert!(matches!(syms[3], PublicSymbol::Tape(TapeSymbol::Head { dir: 1, .. })));
        assert_eq!(syms[4], PublicSymbol::RoundSep);
        assert_eq!(syms[5], PublicSymbol::Delim, "symbol after # is always $");
        assert_eq!(&syms[5..10], &syms[0..5]);
    }

    #[test]
    fn honest_p1_is_undefined_for_non_members() {
        let spec = parse_machine(
            "never",
            "\
kind: nondeterministic
states: q0 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _
space_bound: linear 1
delta: q0 < _ -> qr _ 0 0
",
        )
        .unwrap();
        assert!(matches!(honest_p1_tape(&spec, "a"), Err(StrategyError::NotMember)));
    }

    #[test]
    fn restart_resets_the_tape() {
        let spec = one_move();
        let mut p1 = P1Strategy::Tape(honest_p1_tape(&spec, "a").unwrap());
        let a = p1.next();
        let _ = p1.next();
        p1.observe_coin(false);
        assert_eq!(p1.next(), a);
    }
}
