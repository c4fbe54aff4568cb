//! The shipped end-to-end scenario list.
//!
//! These are the demonstration debates the halting-accumulation sweep runs:
//! every scenario decides well within a million moves, because the claim
//! scenarios use a small coin multiplier and everything else resolves
//! deterministically or at round ends. High-`l` statistical gates are
//! separate experiments with their own parameters.

use debatelab_core::debate::Mode;

use crate::config::ExperimentConfig;
use crate::runner::quick_config;

/// A named end-to-end debate scenario.
pub struct Scenario {
    pub name: &'static str,
    pub config: ExperimentConfig,
}

/// Every shipped scenario, in a stable order.
pub fn shipped(trials: u64, seed: u64, max_steps: u64) -> Vec<Scenario> {
    let zi = Mode::ZeroInfo;
    let pi = Mode::PartialInfo;
    let ci = Mode::Cips;
    let mk = |name: &'static str, config: ExperimentConfig| Scenario { name, config };
    vec![
        mk(
            "zero-info member, silent opponent",
            quick_config("corpus:subset-sum", "11", zi, "honest", "silent", 2, trials, seed, max_steps),
        ),
        mk("zero-info member, misaligned claims", {
            quick_config("corpus:subset-sum", "11", zi, "honest", "misaligned:j=1,k=2", 2, trials, seed, max_steps)
        }),
        mk("zero-info member, false infinity claims", {
            quick_config("corpus:subset-sum", "11", zi, "honest", "false-infinity:round=1", 2, trials, seed, max_steps)
        }),
        mk("zero-info non-member, budget-stall cheat", {
            let mut c = quick_config(
                "corpus:subset-sum",
                "1+1",
                zi,
                "far-cell-error:round=1,index=1",
                "honest",
                2,
                trials,
                seed,
                max_steps,
            );
            c.counter = Some(1);
            c.bound_coeff = Some(1);
            c.m = Some(2);
            c
        }),
        mk("zero-info non-member, endless configuration", {
            quick_config("corpus:subset-sum", "1", zi, "endless-config:round=1", "honest", 2, trials, seed, max_steps)
        }),
        mk("zero-info non-member, wrong initial configuration", {
            quick_config("corpus:subset-sum", "111", zi, "wrong-initial", "honest", 2, trials, seed, max_steps)
        }),
        mk("partial-info member, honest pair", {
            quick_config("corpus:token-game", "11", pi, "honest", "honest", 2, trials, seed, max_steps)
        }),
        mk("partial-info non-member, fabricated accept", {
            quick_config("corpus:token-game", "111", pi, "early-accept:round=1", "honest", 2, trials, seed, max_steps)
        }),
        mk("restart member, honest pair", {
            quick_config("corpus:parity", "11", ci, "honest", "honest", 2, trials, seed, max_steps)
        }),
        mk("restart non-member, fabricated accept", {
            quick_config("corpus:parity", "1", ci, "early-accept:round=1", "honest", 2, trials, seed, max_steps)
        }),
    ]
}
