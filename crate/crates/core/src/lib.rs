//! Simulation laboratory for constant-space probabilistic checking of
//! two-prover debates about small Turing machines.
//!
//! The crate is organized around the protocol roles:
//!
//! - [`machines`] — machine descriptions, configurations, and the local
//!   consistency predicates the verifier relies on;
//! - [`debate`] — the symbol-by-symbol prover communication model, with
//!   visibility projections and the library of prover strategies;
//! - [`verifier`] — the streaming constant-scratch verifier in its three
//!   modes (zero-information, partial-information, restart);
//! - [`analysis`] — exact rational analytics for the claim-processing
//!   coin distributions and their separation bounds;
//! - [`rng`] — seedable random bit sources with per-trial splitting.

pub mod analysis;
pub mod debate;
pub mod machines;
pub mod rng;
pub mod verifier;
