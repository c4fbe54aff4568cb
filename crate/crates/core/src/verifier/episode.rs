//! Isolated sub-protocol episodes for calibration experiments.
//!
//! These drive the very same `ClaimRun` / `InfinityRun` state machines the
//! full verifier uses, over synthetic streams, so their empirical outcome
//! frequencies can be compared against the exact analytic distributions.

use crate::debate::{Mode, PrivateSymbol, PublicSymbol};
use crate::machines::{MachineSpec, TapeSymbol, WorkSym};
use crate::rng::RandomSource;

use super::claim::{ClaimEvent, ClaimRun, InfEvent, InfinityRun};

/// Outcome of one isolated claim-processing episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimOutcome {
    AcceptByCoins,
    Tested { legitimate: bool },
    Continue,
}

/// Runs one claim episode with marks at positions `j` and `k` over synthetic
/// configurations of the given lengths (both at least `j`/`k` + 2 so the
/// stored triples carry real symbols).
pub fn claim_episode(
    spec: &MachineSpec,
    l: u32,
    j: usize,
    k: usize,
    rng: &mut RandomSource,
) -> ClaimOutcome {
    let alpha_len = j + 2;
    let beta_len = k + 2;
    let cell = PublicSymbol::Tape(TapeSymbol::cell(WorkSym(0)));
    let mut claim = ClaimRun::start(l, Mode::ZeroInfo);
    let feed = |claim: &mut ClaimRun, sym, mark, rng: &mut RandomSource| {
        claim.step(spec, sym, mark, None, rng)
    };
    for pos in 1..=alpha_len {
        let mark = if pos == j { PrivateSymbol::Tau } else { PrivateSymbol::Zero };
        let ev = feed(&mut claim, cell, mark, rng);
        debug_assert_eq!(ev, ClaimEvent::Progress);
    }
    let ev = feed(&mut claim, PublicSymbol::Delim, PrivateSymbol::Zero, rng);
    debug_assert_eq!(ev, ClaimEvent::Progress);
    for pos in 1..=beta_len {
        let mark = if pos == k { PrivateSymbol::Upsilon } else { PrivateSymbol::Zero };
        match feed(&mut claim, cell, mark, rng) {
            ClaimEvent::Progress => {}
            ClaimEvent::AcceptByCoins => return ClaimOutcome::AcceptByCoins,
            ClaimEvent::Continue => return ClaimOutcome::Continue,
            ClaimEvent::Tested { legitimate } => return ClaimOutcome::Tested { legitimate },
            ClaimEvent::SyntaxAccept => unreachable!("episode stream is well formed"),
        }
    }
    // The test needs up to two more symbols past upsilon.
    loop {
        match feed(&mut claim, cell, PrivateSymbol::Zero, rng) {
            ClaimEvent::Progress => {}
            ClaimEvent::Tested { legitimate } => return ClaimOutcome::Tested { legitimate },
            ev => unreachable!("unexpected post-upsilon event {ev:?}"),
        }
    }
}

/// Outcome of one isolated endless-configuration episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfinityEpisode {
    pub accepted: bool,
    /// Symbols consumed before the decision.
    pub consumed: u64,
}

/// Drives the endless-configuration check over a stream whose next `$`
/// appears after `delim_after` symbols (`None` for a truly endless stream).
pub fn infinity_episode(
    linear: bool,
    m: u32,
    r: u32,
    n: usize,
    delim_after: Option<u64>,
    rng: &mut RandomSource,
) -> InfinityEpisode {
    let mut run =
        if linear { InfinityRun::linear(m, n) } else { InfinityRun::superlinear(r, n) };
    let cell = PublicSymbol::Tape(TapeSymbol::cell(WorkSym(0)));
    let mut consumed = 0u64;
    loop {
        let sym = match delim_after {
            Some(at) if consumed == at => PublicSymbol::Delim,
            _ => cell,
        };
        consumed += 1;
        match run.step(sym, rng) {
            InfEvent::Progress => {}
            InfEvent::Accept => return InfinityEpisode { accepted: true, consumed },
            InfEvent::Reject => return InfinityEpisode { accepted: false, consumed },
        }
    }
}
