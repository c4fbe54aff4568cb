//! The streaming constant-scratch probabilistic verifier.

mod claim;
mod engine;
mod episode;
mod params;

pub use claim::{ClaimEvent, ClaimRun, InfEvent, InfinityRun};
pub use engine::{
    run_cips, run_debate, run_debate_observed, run_partial_info, Decision, Outcome, RunError,
    Tally, VerifierScratch,
};
pub use episode::{claim_episode, infinity_episode, ClaimOutcome, InfinityEpisode};
pub use params::{default_ruler, ParamsError, ProtocolParams, DEFAULT_MAX_STEPS};
