//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use debatelab_core::debate::{Mode, Transcript};
use debatelab_core::machines::validate_machine;
use debatelab_core::rng::RandomSource;
use debatelab_core::verifier::run_debate_observed;
use num_traits::ToPrimitive;

use crate::config::{ExperimentConfig, MachineRef};
use crate::runner;

#[derive(Debug, Parser)]
#[command(name = "debatelab", version, about = "Probabilistically checked prover debates over small machines")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "zero-info")]
    ZeroInfo,
    #[value(name = "partial-info")]
    PartialInfo,
    #[value(name = "cips")]
    Cips,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::ZeroInfo => Mode::ZeroInfo,
            ModeArg::PartialInfo => Mode::PartialInfo,
            ModeArg::Cips => Mode::Cips,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run end-to-end debates and report outcome statistics.
    Simulate(SimulateArgs),
    /// Run isolated claim-processing episodes against the exact analytics.
    ClaimStats(ClaimStatsArgs),
    /// Print the claim-distribution table: oracle, closed forms, bounds.
    VerifyBounds(VerifyBoundsArgs),
    /// Inspect the shipped machine corpus or validate a machine file.
    Machines(MachinesArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Machine: a file path or `corpus:<name>`.
    #[arg(long)]
    machine: String,
    #[arg(long)]
    input: String,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Membership prover selector, e.g. `honest` or
    /// `far-cell-error:round=1,index=2`.
    #[arg(long, default_value = "honest")]
    p1: String,
    /// Opposing prover selector, e.g. `honest` or `misaligned:j=1,k=2`.
    #[arg(long, default_value = "honest")]
    p0: String,
    #[arg(long, default_value_t = 4)]
    l: u32,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Ruler multiplier; derived from the declared bound when omitted.
    #[arg(long)]
    m: Option<u32>,
    /// Attach a counter track with this width parameter.
    #[arg(long)]
    counter: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Master seed; per-trial streams derive from (seed, trial index).
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    /// Parallel worker count (aggregation is order-independent).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump trial 0's interleaved streams (two aligned rows) to this file.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Write a line-per-move event log of trial 0 to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClaimStatsArgs {
    #[arg(long, default_value_t = 1)]
    l: u32,
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyBoundsArgs {
    #[arg(long, default_value_t = 4)]
    l_max: u32,
    #[arg(long, default_value_t = 8)]
    jk_max: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MachinesArgs {
    #[command(subcommand)]
    command: MachinesCommand,
}

#[derive(Debug, Subcommand)]
enum MachinesCommand {
    /// List the shipped corpus with curated member / non-member inputs.
    List,
    /// Parse and validate a machine description.
    Validate {
        #[arg(long)]
        machine: String,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::ClaimStats(args) => claim_stats(args),
        Command::VerifyBounds(args) => verify_bounds(args),
        Command::Machines(args) => machines(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut config = ExperimentConfig::new(args.machine, args.input, args.mode.into());
    config.p1 = args.p1;
    config.p0 = args.p0;
    config.l = args.l;
    config.r = args.r;
    config.m = args.m;
    config.counter = args.counter;
    config.trials = args.trials;
    config.seed = args.seed;
    config.max_steps = args.max_steps;
    config.jobs = args.jobs;

    if args.transcript.is_some() || args.trace.is_some() {
        dump_debug(&config, args.transcript.as_deref(), args.trace.as_deref())?;
    }

    let report = runner::run_experiment(&config)?;
    print!("{}", report.render());
    if let Some(path) = args.out {
        std::fs::write(&path, report.to_json()).with_context(|| format!("writing {path:?}"))?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

/// Replays trial 0 with bounded step count for the debug dumps.
fn dump_debug(
    config: &ExperimentConfig,
    transcript_path: Option<&std::path::Path>,
    trace_path: Option<&std::path::Path>,
) -> Result<()> {
    let spec = config.prepared_machine()?;
    let mut params = config.protocol_params(&spec)?;
    params.max_steps = params.max_steps.min(10_000);
    let (p1, p0) = runner::build_provers(config, &spec, &params)?;
    let mut rng = RandomSource::for_trial(config.seed, 0);
    let mut transcript = Transcript::default();
    let mut trace_lines: Vec<String> = Vec::new();
    let mut step = 0u64;
    let out = run_debate_observed(
        &spec,
        &params,
        &config.input,
        &mut p1.clone(),
        &mut p0.clone(),
        &mut rng,
        Some(&mut transcript),
        |scratch, head| {
            step += 1;
            if trace_path.is_some() {
                trace_lines.push(format!(
                    "step={step} head={head} scratch={}",
                    hex(&scratch.serialized())
                ));
            }
        },
    )?;
    if let Some(path) = transcript_path {
        let mut text = transcript.render_rows(&spec);
        text.push_str(&format!("decision after {} moves: {:?}\n", out.steps, out.decision));
        std::fs::write(path, text).with_context(|| format!("writing {path:?}"))?;
    }
    if let Some(path) = trace_path {
        let mut f = std::fs::File::create(path)?;
        for line in &trace_lines {
            writeln!(f, "{line}")?;
        }
    }
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn claim_stats(args: ClaimStatsArgs) -> Result<()> {
    let report = runner::claim_stats(args.l, args.j, args.k, args.trials, args.seed)?;
    print!("{}", report.render());
    if let Some(path) = args.out {
        std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn verify_bounds(args: VerifyBoundsArgs) -> Result<()> {
    use debatelab_core::analysis::*;
    let mut rows = Vec::new();
    println!(
        "{:>2} {:>2} {:>2}  {:>13} {:>13} {:>13}  {:>9} {:>9}",
        "l", "j", "k", "Pr[accept]", "Pr[test]", "Pr[continue]", "misalign", "aligned"
    );
    for l in 1..=args.l_max {
        for j in 1..=args.jk_max {
            for k in 1..=args.jk_max {
                let d = claim_distribution_exact(l, j, k)?;
                assert_eq!(d.pr_accept, pr_accept_closed(l, j, k), "closed-form drift");
                assert_eq!(d.pr_test, pr_test_closed(l, j, k), "closed-form drift");
                let mis = if j != k {
                    check_misaligned_bound(l, j, k)?.to_string()
                } else {
                    "-".into()
                };
                let ali = if j == k { check_aligned_bound(l, j)?.to_string() } else { "-".into() };
                let row = format!(
                    "{:>2} {:>2} {:>2}  {:>13.6e} {:>13.6e} {:>13.6e}  {:>9} {:>9}",
                    l,
                    j,
                    k,
                    d.pr_accept.to_f64().unwrap(),
                    d.pr_test.to_f64().unwrap(),
                    d.pr_continue.to_f64().unwrap(),
                    mis,
                    ali
                );
                println!("{row}");
                rows.push(row);
            }
        }
    }
    println!("oracle and closed forms agree exactly on the whole grid");
    if let Some(path) = args.out {
        std::fs::write(&path, rows.join("\n"))?;
    }
    Ok(())
}

fn machines(args: MachinesArgs) -> Result<()> {
    match args.command {
        MachinesCommand::List => {
            for e in crate::corpus::corpus() {
                println!("corpus:{:<12} {}", e.name, e.about);
                println!("    members:     {:?}", e.members);
                println!("    non-members: {:?}", e.non_members);
            }
            Ok(())
        }
        MachinesCommand::Validate { machine } => {
            let spec = MachineRef(machine.clone()).load()?;
            let diags = validate_machine(&spec);
            if diags.is_empty() {
                println!("{machine}: ok ({} states, {} transitions)", spec.state_names.len(), spec.transitions.len());
                Ok(())
            } else {
                for d in &diags {
                    eprintln!("{machine}: {d}");
                }
                anyhow::bail!("{} diagnostic(s)", diags.len());
            }
        }
    }
}
