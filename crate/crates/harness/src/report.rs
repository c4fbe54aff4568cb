//! Structured experiment reports.
//!
//! Reports serialize to a schema-versioned JSON record plus a human table.
//! Serialization is byte-deterministic for a fixed config and seed: field
//! order is fixed by the struct definitions and every aggregate is computed
//! order-independently.

use debatelab_core::verifier::Tally;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::stats::{Rate, StepStats};

pub const SCHEMA_VERSION: &str = "debatelab-report/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub accept: u64,
    pub reject: u64,
    pub undecided: u64,
}

impl Counts {
    pub fn trials(&self) -> u64 {
        self.accept + self.reject + self.undecided
    }

    pub fn decided(&self) -> u64 {
        self.accept + self.reject
    }
}

/// Aggregated outcome of one experiment cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub schema_version: String,
    pub config: ExperimentConfig,
    pub counts: Counts,
    /// Overall acceptance and rejection probabilities.
    pub accept_rate: Rate,
    pub reject_rate: Rate,
    pub undecided_rate: Rate,
    /// Rates among decided trials only.
    pub decided_accept_rate: Rate,
    pub decided_reject_rate: Rate,
    pub steps: StepStats,
    pub tally: Tally,
}

impl TrialReport {
    pub fn build(config: ExperimentConfig, counts: Counts, steps: StepStats, tally: Tally) -> Self {
        let n = counts.trials();
        let d = counts.decided();
        TrialReport {
            schema_version: SCHEMA_VERSION.to_string(),
            config,
            counts,
            accept_rate: Rate::from_counts(counts.accept, n),
            reject_rate: Rate::from_counts(counts.reject, n),
            undecided_rate: Rate::from_counts(counts.undecided, n),
            decided_accept_rate: Rate::from_counts(counts.accept, d),
            decided_reject_rate: Rate::from_counts(counts.reject, d),
            steps,
            tally,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary table.
    pub fn render(&self) -> String {
        let c = &self.counts;
        let mut out = String::new();
        out.push_str(&format!(
            "experiment: {} input={:?} mode={:?} p1={} p0={}\n",
            self.config.machine.0, self.config.input, self.config.mode, self.config.p1,
            self.config.p0
        ));
        out.push_str(&format!(
            "params: l={} r={} m={:?} counter={:?} trials={} seed={} max_steps={}\n",
            self.config.l,
            self.config.r,
            self.config.m,
            self.config.counter,
            self.config.trials,
            self.config.seed,
            self.config.max_steps
        ));
        out.push_str(&format!(
            "outcomes: accept={} reject={} undecided={} (of {})\n",
            c.accept, c.reject, c.undecided, c.trials()
        ));
        out.push_str(&format!(
            "rates: a^w={:.6} +/- {:.6}   r^w={:.6} +/- {:.6}   undecided={:.6}\n",
            self.accept_rate.estimate,
            self.accept_rate.std_error,
            self.reject_rate.estimate,
            self.reject_rate.std_error,
            self.undecided_rate.estimate
        ));
        if c.decided() > 0 {
            out.push_str(&format!(
                "decided-only: accept={:.6}  reject={:.6}  (n={})\n",
                self.decided_accept_rate.estimate,
                self.decided_reject_rate.estimate,
                c.decided()
            ));
        }
        out.push_str(&format!(
            "steps: mean={:.1} p50={} p90={} max={}\n",
            self.steps.mean, self.steps.p50, self.steps.p90, self.steps.max
        ));
        let t = &self.tally;
        out.push_str(&format!(
            "events: rounds={} claims={} coin-accepts={} tests={} (accept {} / reject {}) continues={} inf-checks={}\n",
            t.rounds_completed,
            t.claims_started,
            t.claim_accepts,
            t.claim_tests,
            t.test_accepts,
            t.test_rejects,
            t.claim_continues,
            t.infinity_checks
        ));
        out.push_str(&format!(
            "        p1-syntax-rejects={} window-rejects={} p0-syntax-accepts={} round-accepts={} round-rejects={} restarts={}\n",
            t.p1_syntax_rejects,
            t.window_rejects,
            t.p0_syntax_accepts,
            t.round_end_accepts,
            t.round_end_rejects,
            t.restarts
        ));
        out
    }
}
