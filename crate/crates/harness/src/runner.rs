//! The seeded Monte Carlo experiment runner.
//!
//! Trials are independent: trial `i` draws its coins from a stream derived
//! from `(seed, i)`, so parallel and sequential execution aggregate to the
//! same report, byte for byte.

use anyhow::{Context, Result};
use debatelab_core::debate::{build_p0, build_p1, Mode, P0Spec, P1Spec};
use debatelab_core::machines::MachineSpec;
use debatelab_core::rng::RandomSource;
use debatelab_core::verifier::{
    claim_episode, infinity_episode, run_debate_observed, ClaimOutcome, Decision, Outcome,
    ProtocolParams, Tally,
};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::report::{Counts, TrialReport};
use crate::stats::{step_stats, Rate};

/// Builds the two prover prototypes for a config.
pub fn build_provers(
    config: &ExperimentConfig,
    spec: &MachineSpec,
    params: &ProtocolParams,
) -> Result<(debatelab_core::debate::P1Strategy, debatelab_core::debate::P0Strategy)> {
    let p1_sel = P1Spec::parse(&config.p1).context("membership prover selector")?;
    let p0_sel = P0Spec::parse(&config.p0).context("opposing prover selector")?;
    let p1 = build_p1(spec, &config.input, config.mode, p1_sel)
        .with_context(|| format!("building p1 {:?}", config.p1))?;
    let p0 = build_p0(spec, &config.input, config.mode, params.m, p0_sel, &p1)
        .with_context(|| format!("building p0 {:?}", config.p0))?;
    Ok((p1, p0))
}

/// Raw per-trial outcomes in trial order.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let spec = config.prepared_machine()?;
    let params = config.protocol_params(&spec)?;
    let (p1, p0) = build_provers(config, &spec, &params)?;

    let one = |i: u64| -> Result<Outcome> {
        let mut rng = RandomSource::for_trial(config.seed, i);
        let mut p1 = p1.clone();
        let mut p0 = p0.clone();
        run_debate_observed(&spec, &params, &config.input, &mut p1, &mut p0, &mut rng, None, |_, _| {})
            .map_err(anyhow::Error::from)
    };

    if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .context("building thread pool")?;
        pool.install(|| (0..config.trials).into_par_iter().map(one).collect())
    } else {
        (0..config.trials).map(one).collect()
    }
}

/// Runs the experiment and aggregates the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TrialReport> {
    let outcomes = run_trials(config)?;
    let mut counts = Counts::default();
    let mut tally = Tally::default();
    let mut steps = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        match o.decision {
            Decision::Accept => counts.accept += 1,
            Decision::Reject => counts.reject += 1,
            Decision::Undecided => counts.undecided += 1,
        }
        tally.merge(&o.tally);
        steps.push(o.steps);
    }
    Ok(TrialReport::build(config.clone(), counts, step_stats(steps), tally))
}

/// Undecided fractions of the same trial set under increasing step caps.
/// A trial decided at step `s` is decided under every cap `>= s`, so the
/// fractions are non-increasing by construction.
pub fn undecided_fractions(config: &ExperimentConfig, caps: &[u64]) -> Result<Vec<f64>> {
    let mut config = config.clone();
    config.max_steps = caps.iter().copied().max().unwrap_or(config.max_steps);
    let outcomes = run_trials(&config)?;
    let n = outcomes.len() as f64;
    Ok(caps
        .iter()
        .map(|&cap| {
            outcomes
                .iter()
                .filter(|o| o.decision == Decision::Undecided || o.steps > cap)
                .count() as f64
                / n
        })
        .collect())
}

/// Report of the isolated claim-processing experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimStatsReport {
    pub schema_version: String,
    pub l: u32,
    pub j: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub accept: Rate,
    pub test: Rate,
    pub continue_: Rate,
    /// Exact streaming-oracle values.
    pub oracle_accept: f64,
    pub oracle_test: f64,
    pub oracle_continue: f64,
    /// Closed-form values (must equal the oracle exactly as rationals).
    pub closed_accept: f64,
    pub closed_test: f64,
    /// Distance of the empirical frequencies from the oracle, in standard
    /// errors.
    pub accept_sigmas: f64,
    pub test_sigmas: f64,
}

impl ClaimStatsReport {
    pub fn render(&self) -> String {
        format!(
            "claim-stats l={} j={} k={} trials={} seed={}\n\
             accept:   emp={:.6}  oracle={:.6}  closed={:.6}  ({:+.2} sigma)\n\
             test:     emp={:.6}  oracle={:.6}  closed={:.6}  ({:+.2} sigma)\n\
             continue: emp={:.6}  oracle={:.6}\n",
            self.l,
            self.j,
            self.k,
            self.trials,
            self.seed,
            self.accept.estimate,
            self.oracle_accept,
            self.closed_accept,
            self.accept_sigmas,
            self.test.estimate,
            self.oracle_test,
            self.closed_test,
            self.test_sigmas,
            self.continue_.estimate,
            self.oracle_continue,
        )
    }
}

/// Runs `trials` isolated claim-processing episodes and compares the
/// frequencies against the exact oracle and closed forms.
pub fn claim_stats(l: u32, j: usize, k: usize, trials: u64, seed: u64) -> Result<ClaimStatsReport> {
    anyhow::ensure!(trials > 0, "trials must be at least 1");
    let spec = crate::corpus::load("one-move").expect("corpus machine");
    let (mut acc, mut test, mut cont) = (0u64, 0u64, 0u64);
    for i in 0..trials {
        let mut rng = RandomSource::for_trial(seed, i);
        match claim_episode(&spec, l, j, k, &mut rng) {
            ClaimOutcome::AcceptByCoins => acc += 1,
            ClaimOutcome::Tested { .. } => test += 1,
            ClaimOutcome::Continue => cont += 1,
        }
    }
    let dist = debatelab_core::analysis::claim_distribution_exact(l as u32, j as u32, k as u32)?;
    let oracle_accept = dist.pr_accept.to_f64().unwrap();
    let oracle_test = dist.pr_test.to_f64().unwrap();
    let accept = Rate::from_counts(acc, trials);
    let test_rate = Rate::from_counts(test, trials);
    let sig = |rate: &Rate, p: f64| {
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        if se == 0.0 {
            0.0
        } else {
            (rate.estimate - p) / se
        }
    };
    Ok(ClaimStatsReport {
        schema_version: crate::report::SCHEMA_VERSION.to_string(),
        l,
        j,
        k,
        trials,
        seed,
        accept_sigmas: sig(&accept, oracle_accept),
        test_sigmas: sig(&test_rate, oracle_test),
        accept,
        test: test_rate,
        continue_: Rate::from_counts(cont, trials),
        oracle_accept,
        oracle_test,
        oracle_continue: dist.pr_continue.to_f64().unwrap(),
        closed_accept: debatelab_core::analysis::pr_accept_closed(l as u32, j as u32, k as u32)
            .to_f64()
            .unwrap(),
        closed_test: debatelab_core::analysis::pr_test_closed(l as u32, j as u32, k as u32)
            .to_f64()
            .unwrap(),
    })
}

/// Empirical false-reject rate of the superlinear endless-configuration
/// check against a truthful stream whose `$` arrives after `s_of_n` symbols.
pub fn infinity_stats(
    r: u32,
    n: usize,
    s_of_n: u64,
    trials: u64,
    seed: u64,
) -> (Rate, f64) {
    let mut reject = 0u64;
    for i in 0..trials {
        let mut rng = RandomSource::for_trial(seed, i);
        let ep = infinity_episode(false, 1, r, n, Some(s_of_n), &mut rng);
        if !ep.accepted {
            reject += 1;
        }
    }
    let bound = s_of_n as f64 / 2f64.powi((r as i32) * (n as i32));
    (Rate::from_counts(reject, trials), bound)
}

/// Deterministic ruler episode for the linear regime.
pub fn linear_infinity_probe(m: u32, n: usize, delim_after: Option<u64>) -> (bool, u64) {
    let mut rng = RandomSource::from_seed(0);
    let ep = infinity_episode(true, m, 1, n, delim_after, &mut rng);
    (ep.accepted, ep.consumed)
}

/// Convenience for the acceptance suite: accept/reject among decided trials.
pub fn decided_rates(report: &TrialReport) -> (Rate, Rate) {
    (report.decided_accept_rate, report.decided_reject_rate)
}

/// Runs one cell and asserts nothing: helper for building experiment grids.
pub fn quick_config(
    machine: &str,
    input: &str,
    mode: Mode,
    p1: &str,
    p0: &str,
    l: u32,
    trials: u64,
    seed: u64,
    max_steps: u64,
) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(machine, input, mode);
    c.p1 = p1.into();
    c.p0 = p0.into();
    c.l = l;
    c.trials = trials;
    c.seed = seed;
    c.max_steps = max_steps;
    c
}
