//! Protocol parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::debate::Mode;
use crate::machines::MachineSpec;

/// Tunable constants of the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub mode: Mode,
    /// Coin multiplier for claim processing.
    pub l: u32,
    /// Coin rate of the superlinear endless-configuration check.
    pub r: u32,
    /// Ruler multiplier of the linear endless-configuration check; must
    /// satisfy `m * n > s(n)` for every tested `n > 0`.
    pub m: u32,
    /// Per-trial step cap; reaching it yields an Undecided outcome.
    pub max_steps: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("l, r, and m must be positive")]
    Zero,
    #[error("l <= 8 is required (coin batches are drawn in 32-bit chunks)")]
    LTooLarge,
    #[error("ruler too short: m*n = {ruler} <= s(n) = {bound} at n = {n}")]
    RulerTooShort { ruler: u64, bound: u64, n: usize },
}

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

impl ProtocolParams {
    pub fn new(mode: Mode, l: u32, r: u32, m: u32) -> Result<Self, ParamsError> {
        if l == 0 || r == 0 || m == 0 {
            return Err(ParamsError::Zero);
        }
        if l > 8 {
            return Err(ParamsError::LTooLarge);
        }
        Ok(ProtocolParams { mode, l, r, m, max_steps: DEFAULT_MAX_STEPS })
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// The shipped defaults: `l = 4` targets a wrong-decision ceiling of
    /// one fifth among claim-resolved outcomes; `m` is derived from the
    /// machine's declared bound.
    pub fn defaults_for(mode: Mode, spec: &MachineSpec) -> Self {
        ProtocolParams {
            mode,
            l: 4,
            r: 2,
            m: default_ruler(spec),
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    /// Checks the ruler invariant for a concrete input length.
    pub fn check_ruler(&self, spec: &MachineSpec, n: usize) -> Result<(), ParamsError> {
        if n == 0 || !spec.linear_regime() {
            return Ok(());
        }
        let ruler = self.m as u64 * n as u64;
        let bound = spec.space_bound.eval(n);
        if ruler <= bound {
            return Err(ParamsError::RulerTooShort { ruler, bound, n });
        }
        Ok(())
    }
}

/// Smallest `m` with `m * n > s(n)` for all `n > 0` under a linear bound.
pub fn default_ruler(spec: &MachineSpec) -> u32 {
    match spec.space_bound {
        crate::machines::SpaceBound::Linear { coeff } => coeff + 1,
        crate::machines::SpaceBound::Poly { degree: 1, coeff } => coeff + 1,
        // Superlinear machines use the coin-based check; the ruler is moot.
        _ => 1,
    }
}
