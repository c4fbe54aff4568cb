//! Opposing-prover strategies as per-round response plans.
//!
//! Every opposing prover here is deterministic and built ahead of time by
//! co-simulating the (deterministic) membership prover's rounds with this
//! prover's own announcement policy. The honest prover analyzes each round
//! for its first defect and plants a claim there; cheating provers plant
//! their scripted markers. Plans are shared across trials, so the per-trial
//! state is just a cursor.

use std::sync::Arc;

use super::alphabet::{P0Symbol, PrivateSymbol, PublicSymbol};
use super::strategy::{Mode, P1Strategy, StrategyError, SIM_MAX_ROUNDS};
use crate::machines::{
    head_windows_consistent, initial_configuration, input_tape, successors, triple_pair_spanned,
    Configuration, GameOracle, MachineSpec, Span, TapeSymbol, Triple, WindowSlot,
};

/// One round of opposing-prover output, aligned symbol-for-symbol with the
/// membership prover's round. `endless` rounds continue with zeros forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundPlan {
    pub syms: Vec<P0Symbol>,
    pub endless: bool,
}

/// A plan-backed opposing prover.
#[derive(Clone)]
pub struct P0Strategy {
    plans: Arc<Vec<RoundPlan>>,
    cycle_start: usize,
    pub label: Arc<str>,
    round: usize,
    pos: usize,
}

impl P0Strategy {
    fn new(plans: Vec<RoundPlan>, cycle_start: usize, label: impl Into<Arc<str>>) -> Self {
        assert!(!plans.is_empty() && cycle_start < plans.len());
        P0Strategy { plans: Arc::new(plans), cycle_start, label: label.into(), round: 0, pos: 0 }
    }

    pub fn next(&mut self) -> P0Symbol {
        let plan = &self.plans[self.round];
        if self.pos < plan.syms.len() {
            let s = plan.syms[self.pos];
            self.pos += 1;
            if self.pos == plan.syms.len() && !plan.endless {
                self.round = if self.round + 1 < self.plans.len() {
                    self.round + 1
                } else {
                    self.cycle_start
                };
                self.pos = 0;
            }
            s
        } else {
            P0Symbol::Private(PrivateSymbol::Zero)
        }
    }

    pub fn observe_p1(&mut self, _sym: PublicSymbol) {}

    pub fn observe_coin(&mut self, bit: bool) {
        if !bit {
            self.round = 0;
            self.pos = 0;
        }
    }
}

/// A co-simulated membership-prover round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRound {
    pub p1: Vec<PublicSymbol>,
    /// The round never ended within the lookahead; this symbol repeats.
    pub tail: Option<PublicSymbol>,
    /// `(index into p1, choice)` announcement slots, as fed by the policy.
    pub announced: Vec<(usize, u8)>,
}

/// Announcement policy used while co-simulating.
pub enum Policy {
    /// Refute via exhaustive minimax on the claimed position.
    Minimax(Box<GameOracle>),
    Constant(u8),
}

impl Policy {
    fn choose(&mut self, cfg: Option<&Configuration>, head: usize) -> u8 {
        match self {
            Policy::Constant(c) => *c,
            Policy::Minimax(oracle) => match cfg {
                Some(c) => oracle.refuting_choice(c, head),
                None => 0,
            },
        }
    }
}

/// Lookahead bound after which a configuration counts as endless: generous
/// multiples of the space bound and the ruler length.
pub fn endless_lookahead(spec: &MachineSpec, n: usize, ruler_m: u32) -> usize {
    let s = spec.space_bound.eval(n.max(1)) as usize;
    (3 * s).max(ruler_m as usize * n.max(1)).max(64) + 4
}

/// Runs the membership prover forward through whole rounds until the round
/// stream repeats, feeding announcements by `policy` in partial mode.
/// Returns the distinct rounds and the index the stream cycles back to.
pub fn simulate_rounds(
    mut p1: P1Strategy,
    mode: Mode,
    policy: &mut Policy,
    lookahead: usize,
) -> (Vec<SimRound>, usize) {
    let mut rounds: Vec<SimRound> = Vec::new();
    for _ in 0..SIM_MAX_ROUNDS {
        let round = simulate_one_round(&mut p1, mode, policy, lookahead);
        let endless = round.tail.is_some();
        if let Some(prev) = rounds.iter().position(|r| *r == round) {
            return (rounds, prev);
        }
        rounds.push(round);
        if endless {
            break;
        }
    }
    let cycle = rounds.len() - 1;
    (rounds, cycle)
}

fn simulate_one_round(
    p1: &mut P1Strategy,
    mode: Mode,
    policy: &mut Policy,
    lookahead: usize,
) -> SimRound {
    let mut syms = Vec::new();
    let mut announced = Vec::new();
    let mut configs_done = 0usize;
    let mut current: Vec<TapeSymbol> = Vec::new();
    let mut last_cfg: Option<Configuration> = None;
    let mut head = 0usize;

    loop {
        if syms.len() > lookahead {
            // Endless configuration; everything past the prefix repeats the
            // last emitted symbol for analysis purposes.
            let tail = *syms.last().unwrap();
            return SimRound { p1: syms, tail: Some(tail), announced };
        }
        let s = p1.next();
        syms.push(s);
        match s {
            PublicSymbol::Delim => {
                if !current.is_empty() {
                    let cfg = Configuration { syms: std::mem::take(&mut current) };
                    if cfg.well_formed() {
                        if configs_done > 0 {
                            head = (head as isize + cfg.dir() as isize).clamp(0, isize::MAX) as usize;
                        }
                        last_cfg = Some(cfg);
                    } else {
                        last_cfg = None;
                    }
                    configs_done += 1;
                }
                // Announcement slot: the `$` closing each completed pair.
                if mode == Mode::PartialInfo && configs_done >= 2 && configs_done % 2 == 0 {
                    let c = policy.choose(last_cfg.as_ref(), head);
                    announced.push((syms.len() - 1, c));
                    p1.observe_p0(PublicSymbol::Choice(c));
                }
            }
            PublicSymbol::RoundSep => {
                return SimRound { p1: syms, tail: None, announced };
            }
            PublicSymbol::Tape(t) => current.push(t),
            PublicSymbol::Choice(_) => {}
        }
    }
}

/// A parsed round: configurations with their delimiting positions.
struct ParsedRound {
    /// `(delim index, first symbol index, configuration)`; malformed
    /// configurations are `None`.
    configs: Vec<(usize, usize, Option<Configuration>)>,
}

fn parse_round(p1: &[PublicSymbol], endless: bool) -> ParsedRound {
    let mut configs = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    let mut cells: Vec<TapeSymbol> = Vec::new();
    for (i, s) in p1.iter().enumerate() {
        match s {
            PublicSymbol::Delim | PublicSymbol::RoundSep => {
                if let Some((delim, start)) = open.take() {
                    let cfg = Configuration { syms: std::mem::take(&mut cells) };
                    configs.push((delim, start, cfg.well_formed().then_some(cfg)));
                }
                if matches!(s, PublicSymbol::Delim) {
                    open = Some((i, i + 1));
                }
            }
            PublicSymbol::Tape(t) => cells.push(*t),
            PublicSymbol::Choice(_) => cells.push(TapeSymbol::Head {
                // A choice symbol inside a configuration malforms it; an
                // extra marker guarantees `well_formed` fails.
                state: crate::machines::StateId(u16::MAX),
                dir: 0,
            }),
        }
    }
    if !endless {
        if let Some((delim, start)) = open {
            let cfg = Configuration { syms: cells };
            configs.push((delim, start, cfg.well_formed().then_some(cfg)));
        }
    }
    ParsedRound { configs }
}

fn triple_at(c: &Configuration, idx: usize) -> Triple {
    let slot = |i: usize| match c.syms.get(i - 1) {
        Some(&s) => WindowSlot::Sym(s),
        None => WindowSlot::Pad,
    };
    [slot(idx), slot(idx + 1), slot(idx + 2)]
}

/// Builds the honest opposing prover: claims the first defect of each
/// round, announces refuting universal choices, and raises the endless-
/// configuration claim when the membership prover stops closing
/// configurations.
pub fn honest_p0(
    spec: &MachineSpec,
    input: &str,
    mode: Mode,
    ruler_m: u32,
    p1_proto: &P1Strategy,
) -> Result<P0Strategy, StrategyError> {
    let mut policy = match mode {
        Mode::PartialInfo => Policy::Minimax(Box::new(
            GameOracle::new(spec, input, super::strategy::GAME_DEPTH)
                .map_err(|e| StrategyError::Game(e.to_string()))?,
        )),
        _ => Policy::Constant(0),
    };
    let lookahead = endless_lookahead(spec, input.len(), ruler_m);
    let (rounds, cycle_start) = simulate_rounds(p1_proto.clone(), mode, &mut policy, lookahead);
    let plans: Vec<RoundPlan> =
        rounds.iter().map(|r| plan_honest_round(spec, input, mode, r)).collect();
    Ok(P0Strategy::new(plans, cycle_start, "honest"))
}

/// Analysis of one round into the honest response plan.
fn plan_honest_round(
    spec: &MachineSpec,
    input: &str,
    mode: Mode,
    round: &SimRound,
) -> RoundPlan {
    let mut syms = vec![P0Symbol::Private(PrivateSymbol::Zero); round.p1.len()];
    for &(i, c) in &round.announced {
        syms[i] = P0Symbol::Public(PublicSymbol::Choice(c));
    }

    let parsed = parse_round(&round.p1, round.tail.is_some());
    let tape = input_tape(input);
    let ceiling = spec
        .counter
        .map(|p| p.ceiling(spec.space_bound, input.len().max(1)).expect("checked at build"));

    // The endless claim sits at the `$` opening the configuration that
    // never closes: the last delimiter of the prefix. Restart mode has no
    // endless claims (the machine halts; restarts bound the stream).
    if round.tail.is_some() && mode != Mode::Cips {
        if let Some(last_delim) = round
            .p1
            .iter()
            .rposition(|s| matches!(s, PublicSymbol::Delim))
        {
            syms[last_delim] = P0Symbol::Private(PrivateSymbol::Infinity);
        }
        // Transition errors before the endless configuration could also be
        // claimed, but the endless claim already resolves every round.
        return RoundPlan { syms, endless: true };
    }

    // Walk the claimed pairs; stop at whatever the verifier will catch on
    // its own, otherwise claim the first genuine defect.
    let announced_at = |delim: usize| -> Option<u8> {
        round.announced.iter().find(|(i, _)| *i == delim).map(|(_, c)| *c)
    };
    let mut head = 0usize;
    for t in 0..parsed.configs.len() {
        let (_, _, ref cfg) = parsed.configs[t];
        let Some(cfg) = cfg else { break };
        if t == 0 {
            if *cfg != initial_configuration(spec) {
                break; // verifier rejects the round opening
            }
            continue;
        }
        let (_, _, ref prev) = parsed.configs[t - 1];
        let Some(prev) = prev else { break };
        let this_delim = parsed.configs[t].0;
        let announced = announced_at(this_delim);
        let sigma = tape[head];
        let w0 = crate::machines::window_at_head(prev);
        let w1 = crate::machines::window_at_head(cfg);
        if !head_windows_consistent(spec, &w0, &w1, sigma, Span::One, announced.map(usize::from)) {
            break; // deterministic reject
        }
        let matches_real = successors(spec, prev, sigma, ceiling).into_iter().any(|s| {
            s.config == *cfg && announced.is_none_or(|c| s.choice == c as usize)
        });
        if matches_real {
            head = (head as isize + cfg.dir() as isize) as usize;
            continue;
        }
        // Defect: decide the claim shape. With configs numbered from 1,
        // moves out of even-numbered configs are the announced universal
        // ones. A defective existential move past the opening pair can only
        // be claimed two moves from the preceding even config, because its
        // own opening `$` hosts an announcement.
        let (alpha_t, span, claim_announced) = if mode == Mode::PartialInfo
            && t % 2 == 1
            && t >= 3
        {
            let c = announced_at(parsed.configs[t - 1].0).unwrap_or(0) as usize;
            (t - 2, Span::Two { announced: c }, None)
        } else if mode == Mode::PartialInfo && t >= 2 && t % 2 == 0 {
            (t - 1, Span::One, announced.map(|c| c as usize))
        } else {
            (t - 1, Span::One, None)
        };
        let (alpha_delim, alpha_start, ref alpha) = parsed.configs[alpha_t];
        let Some(alpha) = alpha else { break };
        let beta_start = parsed.configs[t].1;
        let limit = alpha.syms.len().min(cfg.syms.len());
        let found = (1..=limit).find(|&i| {
            !triple_pair_spanned(
                spec,
                &triple_at(alpha, i),
                &triple_at(cfg, i),
                span,
                claim_announced,
                i == 1,
            )
        });
        if let Some(i) = found {
            syms[alpha_delim] = P0Symbol::Private(PrivateSymbol::Sigma);
            syms[alpha_start + i - 1] = P0Symbol::Private(PrivateSymbol::Tau);
            syms[beta_start + i - 1] = P0Symbol::Private(PrivateSymbol::Upsilon);
        }
        break; // one claim per round
    }
    RoundPlan { syms, endless: false }
}

/// Named cheating opposing provers.
/// Named cheating opposing provers.
pub mod cheats {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum SyntaxVariant {
        /// `τ` with no open claim.
        TauFirst,
        /// Two `ς` in one claim.
        DoubleSigma,
        /// `∞` away from any `$` slot.
        InfinityOffDelim,
    }

    fn sim(
        p1_proto: &P1Strategy,
        mode: Mode,
        spec: &MachineSpec,
        input: &str,
        ruler_m: u32,
    ) -> (Vec<SimRound>, usize) {
        let mut policy = Policy::Constant(0);
        let lookahead = endless_lookahead(spec, input.len(), ruler_m);
        simulate_rounds(p1_proto.clone(), mode, &mut policy, lookahead)
    }

    fn base_plan(round: &SimRound) -> RoundPlan {
        let mut syms = vec![P0Symbol::Private(PrivateSymbol::Zero); round.p1.len()];
        for &(i, c) in &round.announced {
            syms[i] = P0Symbol::Public(PublicSymbol::Choice(c));
        }
        RoundPlan { syms, endless: round.tail.is_some() }
    }

    /// All zeros (plus announcements in partial mode).
    pub fn silent(
        spec: &MachineSpec,
        input: &str,
        mode: Mode,
        ruler_m: u32,
        p1_proto: &P1Strategy,
    ) -> Result<P0Strategy, StrategyError> {
        // The literal strategy never announces either; in partial mode the
        // verifier accepts at the first announcement slot it misses.
        let (rounds, cycle) = sim(p1_proto, mode, spec, input, ruler_m);
        let plans = rounds
            .iter()
            .map(|r| RoundPlan {
                syms: vec![P0Symbol::Private(PrivateSymbol::Zero); r.p1.len()],
                endless: r.tail.is_some(),
            })
            .collect::<Vec<_>>();
        Ok(P0Strategy::new(plans, cycle, "silent"))
    }

    /// Claims a transition error with deliberately unequal indices at the
    /// first anchor where both claimed configurations are long enough.
    pub fn misaligned(
        spec: &MachineSpec,
        input: &str,
        mode: Mode,
        ruler_m: u32,
        j: usize,
        k: usize,
        p1_proto: &P1Strategy,
    ) -> Result<P0Strategy, StrategyError> {
        if j == 0 || k == 0 {
            return Err(StrategyError::NoSite("indices are 1-based".into()));
        }
        let (rounds, cycle) = sim(p1_proto, mode, spec, input, ruler_m);
        let mut plans = Vec::with_capacity(rounds.len());
        let mut placed_any = false;
        for round in &rounds {
            let mut plan = base_plan(round);
            let parsed = parse_round(&round.p1, round.tail.is_some());
            let is_announce = |delim: usize| round.announced.iter().any(|(i, _)| *i == delim);
            for t in 0..parsed.configs.len().saturating_sub(1) {
                let (delim, start, ref a) = parsed.configs[t];
                let (_, bstart, ref b) = parsed.configs[t + 1];
                if is_announce(delim) {
                    continue;
                }
                if let (Some(a), Some(b)) = (a, b) {
                    if a.syms.len() >= j && b.syms.len() >= k {
                        plan.syms[delim] = P0Symbol::Private(PrivateSymbol::Sigma);
                        plan.syms[start + j - 1] = P0Symbol::Private(PrivateSymbol::Tau);
                        plan.syms[bstart + k - 1] = P0Symbol::Private(PrivateSymbol::Upsilon);
                        placed_any = true;
                        break;
                    }
                }
            }
            plans.push(plan);
        }
        if !placed_any {
            return Err(StrategyError::NoSite(format!(
                "no configuration pair admits tau at {j} and upsilon at {k}"
            )));
        }
        Ok(P0Strategy::new(plans, cycle, format!("misaligned:j={j},k={k}")))
    }

    /// Raises the endless-configuration claim against a stream that does
    /// close its configurations.
    pub fn false_infinity(
        spec: &MachineSpec,
        input: &str,
        mode: Mode,
        ruler_m: u32,
        round: usize,
        p1_proto: &P1Strategy,
    ) -> Result<P0Strategy, StrategyError> {
        if round == 0 {
            return Err(StrategyError::NoSite("rounds are 1-based".into()));
        }
        let (rounds, cycle) = sim(p1_proto, mode, spec, input, ruler_m);
        let mut plans: Vec<RoundPlan> = rounds.iter().map(base_plan).collect();
        let target = (round - 1).min(plans.len() - 1);
        for (idx, plan) in plans.iter_mut().enumerate() {
            if idx >= target {
                if let Some(d) =
                    rounds[idx].p1.iter().position(|s| matches!(s, PublicSymbol::Delim))
                {
                    plan.syms[d] = P0Symbol::Private(PrivateSymbol::Infinity);
                }
            }
        }
        Ok(P0Strategy::new(plans, cycle, format!("false-infinity:round={round}")))
    }

    /// Easily detectable protocol garbage.
    pub fn bad_syntax(
        spec: &MachineSpec,
        input: &str,
        mode: Mode,
        ruler_m: u32,
        variant: SyntaxVariant,
        p1_proto: &P1Strategy,
    ) -> Result<P0Strategy, StrategyError> {
        let (rounds, cycle) = sim(p1_proto, mode, spec, input, ruler_m);
        let mut plans: Vec<RoundPlan> = rounds.iter().map(base_plan).collect();
        let round = &rounds[0];
        let plan = &mut plans[0];
        let delims: Vec<usize> = round
            .p1
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, PublicSymbol::Delim))
            .map(|(i, _)| i)
            .collect();
        match variant {
            SyntaxVariant::TauFirst => {
                let i = (1..round.p1.len())
                    .find(|i| !matches!(round.p1[*i], PublicSymbol::Delim | PublicSymbol::RoundSep))
                    .unwrap_or(0);
                plan.syms[i] = P0Symbol::Private(PrivateSymbol::Tau);
            }
            SyntaxVariant::DoubleSigma => {
                for &d in delims.iter().take(2) {
                    plan.syms[d] = P0Symbol::Private(PrivateSymbol::Sigma);
                }
            }
            SyntaxVariant::InfinityOffDelim => {
                let i = (0..round.p1.len())
                    .find(|i| !matches!(round.p1[*i], PublicSymbol::Delim))
                    .unwrap_or(0);
                plan.syms[i] = P0Symbol::Private(PrivateSymbol::Infinity);
            }
        }
        let _ = spec;
        Ok(P0Strategy::new(plans, cycle, format!("bad-syntax:{variant:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debate::strategy::{honest_p1_tape, tapes};
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
    fn honest_p0_zeros_forever_against_honest_p1_on_a_member() {
        let spec = one_move();
        let p1 = P1Strategy::Tape(honest_p1_tape(&spec, "a").unwrap());
        let mut p0 = honest_p0(&spec, "a", Mode::ZeroInfo, 2, &p1).unwrap();
        for _ in 0..40 {
            assert_eq!(p0.next(), P0Symbol::Private(PrivateSymbol::Zero));
        }
    }

    #[test]
    fn honest_p0_places_infinity_at_the_opening_delimiter() {
        let spec = one_move();
        let p1 = P1Strategy::Tape(tapes::endless_config(&spec, "a", 1).unwrap());
        let mut p0 = honest_p0(&spec, "a", Mode::ZeroInfo, 2, &p1).unwrap();
        // Stream: $ [q0.] $ X X X ... ; the second delimiter carries the claim.
        let got: Vec<P0Symbol> = (0..6).map(|_| p0.next()).collect();
        assert_eq!(got[2], P0Symbol::Private(PrivateSymbol::Infinity));
        assert!(got
            .iter()
            .enumerate()
            .all(|(i, s)| i == 2 || *s == P0Symbol::Private(PrivateSymbol::Zero)));
    }

    #[test]
    fn misaligned_claim_lands_sigma_tau_upsilon_by_construction() {
        let spec = parse_machine(
            "wide",
            "\
kind: nondeterministic
states: q0 q1 q2 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _ X
space_bound: linear 2
delta: q0 < _ -> q1 X +1 +1
delta: q1 a _ -> q2 X 0 +1
delta: q2 a _ -> qa _ 0 0
",
        )
        .unwrap();
        // Honest rounds: $ [q0.] $ X [q1+] $ X [q2.] X? ... — the pair
        // (c2, c3) has |c2| = 2 and |c3| >= 2.
        let p1 = P1Strategy::Tape(honest_p1_tape(&spec, "a").unwrap());
        let mut p0 =
            cheats::misaligned(&spec, "a", Mode::ZeroInfo, 3, 1, 2, &p1).unwrap();
        let mut seen = Vec::new();
        for _ in 0..16 {
            seen.push(p0.next());
        }
        assert!(seen.contains(&P0Symbol::Private(PrivateSymbol::Sigma)));
        assert!(seen.contains(&P0Symbol::Private(PrivateSymbol::Tau)));
        assert!(seen.contains(&P0Symbol::Private(PrivateSymbol::Upsilon)));
    }
}
