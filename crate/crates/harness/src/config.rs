//! Experiment configuration.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use debatelab_core::debate::Mode;
use debatelab_core::machines::{
    instrument_with_counter, parse_machine, validate_machine, CounterParams, MachineSpec,
};
use debatelab_core::verifier::{default_ruler, ProtocolParams, DEFAULT_MAX_STEPS};
use serde::{Deserialize, Serialize};

use crate::corpus;

/// Where a machine description comes from: `corpus:<name>` or a file path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineRef(pub String);

impl MachineRef {
    pub fn load(&self) -> Result<MachineSpec> {
        let spec = if let Some(name) = self.0.strip_prefix("corpus:") {
            corpus::load(name).with_context(|| format!("no corpus machine named {name:?}"))?
        } else {
            let text = std::fs::read_to_string(&self.0)
                .with_context(|| format!("reading machine file {:?}", self.0))?;
            let name = PathBuf::from(&self.0)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.0.clone());
            parse_machine(&name, &text)?
        };
        let diags = validate_machine(&spec);
        if !diags.is_empty() {
            bail!(
                "machine {:?} fails validation:\n{}",
                self.0,
                diags.iter().map(|d| format!("  - {d}")).collect::<Vec<_>>().join("\n")
            );
        }
        Ok(spec)
    }
}

/// A fully specified experiment: everything the runner needs, and nothing
/// drawn from the environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub machine: MachineRef,
    pub input: String,
    pub mode: Mode,
    pub p1: String,
    pub p0: String,
    pub l: u32,
    pub r: u32,
    /// Ruler multiplier; `None` derives it from the declared bound.
    pub m: Option<u32>,
    /// Counter-track instrumentation.
    pub counter: Option<u32>,
    /// Overrides the declared linear bound coefficient (used by the tight-
    /// budget experiment variants).
    pub bound_coeff: Option<u32>,
    pub trials: u64,
    pub seed: u64,
    pub max_steps: u64,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(machine: impl Into<String>, input: impl Into<String>, mode: Mode) -> Self {
        ExperimentConfig {
            machine: MachineRef(machine.into()),
            input: input.into(),
            mode,
            p1: "honest".into(),
            p0: "honest".into(),
            l: 4,
            r: 2,
            m: None,
            counter: None,
            bound_coeff: None,
            trials: 1000,
            seed: 0,
            max_steps: DEFAULT_MAX_STEPS,
            jobs: 1,
        }
    }

    /// Loads and prepares the machine, applying the bound override and the
    /// counter track.
    pub fn prepared_machine(&self) -> Result<MachineSpec> {
        let mut spec = self.machine.load()?;
        if let Some(coeff) = self.bound_coeff {
            spec.space_bound = debatelab_core::machines::SpaceBound::Linear { coeff };
        }
        if let Some(c) = self.counter {
            spec = instrument_with_counter(&spec, CounterParams { c })?;
        }
        Ok(spec)
    }

    pub fn protocol_params(&self, spec: &MachineSpec) -> Result<ProtocolParams> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        let m = self.m.unwrap_or_else(|| default_ruler(spec));
        let params =
            ProtocolParams::new(self.mode, self.l, self.r, m)?.with_max_steps(self.max_steps);
        params.check_ruler(spec, self.input.len())?;
        Ok(params)
    }
}
