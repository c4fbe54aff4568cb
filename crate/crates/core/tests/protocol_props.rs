//! End-to-end protocol behavior on desk-scale machines: deterministic
//! catches, claim statistics, visibility, replay determinism, and the
//! constant-scratch contract.

use debatelab_core::debate::{build_p0, build_p1, Mode, P0Spec, P1Spec, Transcript};
use debatelab_core::machines::{
    instrument_with_counter, parse_machine, validate_machine, CounterParams, MachineSpec,
};
use debatelab_core::rng::RandomSource;
use debatelab_core::verifier::{
    run_cips, run_debate, run_debate_observed, run_partial_info, Decision, ProtocolParams,
};

/// Nondeterministic block-subset machine: take or skip each `+`-separated
/// block of 1s; accept iff the taken blocks hold exactly two 1s.
fn subset_sum() -> MachineSpec {
    let spec = parse_machine(
        "subset-sum",
        "\
kind: nondeterministic
states: q0 qc qt qs k1 k2 k3 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: 1 +
work_alphabet: _ B X
space_bound: linear 3
delta: q0 < _ -> qc B +1 +1
delta: qc 1 _ -> qt X +1 +1
delta: qc 1 _ -> qs _ +1 0
delta: qc + _ -> qc _ +1 0
delta: qc > _ -> k1 _ 0 -1
delta: qt 1 _ -> qt X +1 +1
delta: qt + _ -> qc _ +1 0
delta: qt > _ -> k1 _ 0 -1
delta: qs 1 _ -> qs _ +1 0
delta: qs + _ -> qc _ +1 0
delta: qs > _ -> k1 _ 0 -1
delta: k1 > X -> k2 X 0 -1
delta: k2 > X -> k3 X 0 -1
delta: k3 > B -> qa B 0 0
",
    )
    .unwrap();
    assert!(validate_machine(&spec).is_empty());
    spec
}

/// The same machine with a counter budget of `2^n` actions: the shortest
/// accepting path for `1+1` needs 8 actions, one over the budget at n = 3.
fn subset_sum_tight() -> MachineSpec {
    let mut spec = subset_sum();
    spec.space_bound = debatelab_core::machines::SpaceBound::Linear { coeff: 1 };
    instrument_with_counter(&spec, CounterParams { c: 1 }).unwrap()
}

/// Last-token-wins subtraction game on a row of 1s; the first player wins
/// iff the token count is not divisible by three.
fn token_game() -> MachineSpec {
    let spec = parse_machine(
        "token-game",
        "\
kind: alternating
states: e0 ed1 ed2 a0 ad1 ad2 acc rej
start: e0
accept: acc
reject: rej
modes: e0=e ed1=u ed2=e a0=u ad1=e ad2=u
input_alphabet: 1
work_alphabet: _
space_bound: linear 1
delta: e0 < _ -> a0 _ +1 0
delta: e0 < _ -> ed1 _ +1 0
delta: e0 1 _ -> a0 _ +1 0
delta: e0 1 _ -> ed1 _ +1 0
delta: e0 > _ -> acc _ 0 0
delta: e0 > _ -> acc _ 0 0
delta: ed1 1 _ -> ed2 _ +1 0
delta: ed1 1 _ -> ed2 _ +1 0
delta: ed1 > _ -> rej _ 0 0
delta: ed1 > _ -> rej _ 0 0
delta: ed2 1 _ -> a0 _ 0 0
delta: ed2 1 _ -> a0 _ 0 0
delta: ed2 > _ -> rej _ 0 0
delta: ed2 > _ -> rej _ 0 0
delta: a0 1 _ -> e0 _ +1 0
delta: a0 1 _ -> ad1 _ +1 0
delta: a0 > _ -> rej _ 0 0
delta: a0 > _ -> rej _ 0 0
delta: ad1 1 _ -> ad2 _ +1 0
delta: ad1 1 _ -> ad2 _ +1 0
delta: ad1 > _ -> acc _ 0 0
delta: ad1 > _ -> acc _ 0 0
delta: ad2 1 _ -> e0 _ 0 0
delta: ad2 1 _ -> e0 _ 0 0
delta: ad2 > _ -> acc _ 0 0
delta: ad2 > _ -> acc _ 0 0
",
    )
    .unwrap();
    assert!(validate_machine(&spec).is_empty());
    spec
}

/// Even-parity acceptor over 1s, all configurations a single marker.
fn parity() -> MachineSpec {
    parse_machine(
        "parity",
        "\
kind: deterministic
states: qe qo qa qr
start: qe
accept: qa
reject: qr
input_alphabet: 1
work_alphabet: _
space_bound: linear 1
delta: qe < _ -> qe _ +1 0
delta: qe 1 _ -> qo _ +1 0
delta: qo 1 _ -> qe _ +1 0
delta: qe > _ -> qa _ 0 0
delta: qo > _ -> qr _ 0 0
",
    )
    .unwrap()
}

fn params(mode: Mode, l: u32, spec: &MachineSpec) -> ProtocolParams {
    let mut p = ProtocolParams::defaults_for(mode, spec);
    p.l = l;
    p
}

#[test]
fn member_with_silent_opponent_accepts_at_first_round_end() {
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 4, &spec);
    let p1p = build_p1(&spec, "11", Mode::ZeroInfo, P1Spec::Honest).unwrap();
    let p0p = build_p0(&spec, "11", Mode::ZeroInfo, p.m, P0Spec::Silent, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(1);
    let out = run_debate(&spec, &p, "11", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Accept);
    assert_eq!(out.tally.round_end_accepts, 1);
    assert_eq!(out.tally.claims_started, 0);
}

#[test]
fn wrong_initial_rejects_during_the_first_configuration() {
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 4, &spec);
    let p1p = build_p1(&spec, "1", Mode::ZeroInfo, P1Spec::WrongInitial).unwrap();
    let p0p = build_p0(&spec, "1", Mode::ZeroInfo, p.m, P0Spec::Silent, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(2);
    let out = run_debate(&spec, &p, "1", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Reject);
    assert_eq!(out.tally.p1_syntax_rejects, 1);
    assert!(out.steps <= 3);
}

#[test]
fn head_error_rejects_via_the_window_check() {
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 4, &spec);
    let p1p = build_p1(&spec, "1", Mode::ZeroInfo, P1Spec::HeadError { round: 1 }).unwrap();
    let p0p = build_p0(&spec, "1", Mode::ZeroInfo, p.m, P0Spec::Silent, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(3);
    let out = run_debate(&spec, &p, "1", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Reject);
    assert_eq!(out.tally.window_rejects, 1);
}

#[test]
fn endless_configuration_is_rejected_after_exactly_the_ruler_length() {
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 4, &spec);
    let input = "1";
    let p1p = build_p1(&spec, input, Mode::ZeroInfo, P1Spec::EndlessConfig { round: 1 }).unwrap();
    let p0p = build_p0(&spec, input, Mode::ZeroInfo, p.m, P0Spec::Honest, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(4);
    let out =
        run_debate(&spec, &p, input, &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Reject);
    assert_eq!(out.tally.infinity_checks, 1);
    // Stream: `$ [q0] $` then endless cells; the claim opens at step 3 and
    // the ruler meters m*n further symbols.
    assert_eq!(out.steps, 3 + (p.m as u64) * (input.len() as u64));
}

#[test]
fn false_infinity_against_honest_member_accepts_deterministically() {
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 4, &spec);
    let p1p = build_p1(&spec, "11", Mode::ZeroInfo, P1Spec::Honest).unwrap();
    let p0p =
        build_p0(&spec, "11", Mode::ZeroInfo, p.m, P0Spec::FalseInfinity { round: 1 }, &p1p)
            .unwrap();
    let mut rng = RandomSource::from_seed(5);
    let out = run_debate(&spec, &p, "11", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Accept, "the scan finds the next $");
}

#[test]
fn bad_syntax_opponents_are_accepted_immediately() {
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 4, &spec);
    let p1p = build_p1(&spec, "11", Mode::ZeroInfo, P1Spec::Honest).unwrap();
    for sel in ["bad-syntax", "bad-syntax:variant=double-sigma", "bad-syntax:variant=infinity-off-delim"] {
        let p0p = build_p0(
            &spec,
            "11",
            Mode::ZeroInfo,
            p.m,
            P0Spec::parse(sel).unwrap(),
            &p1p,
        )
        .unwrap();
        let mut rng = RandomSource::from_seed(6);
        let out =
            run_debate(&spec, &p, "11", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
        assert_eq!(out.decision, Decision::Accept, "{sel}");
        assert!(out.tally.p0_syntax_accepts >= 1, "{sel}");
    }
}

#[test]
fn counter_stall_cheat_is_mostly_rejected_among_decided_runs() {
    let spec = subset_sum_tight();
    // `1+1` is accepted in 8 actions but the ceiling is 2^3 = 8, so it is
    // not a member; the cheat stalls the counter once at cell 1.
    let mut p = params(Mode::ZeroInfo, 1, &spec);
    p.max_steps = 50_000;
    let p1p =
        build_p1(&spec, "1+1", Mode::ZeroInfo, P1Spec::FarCellError { round: 1, index: 1 })
            .unwrap();
    let p0p = build_p0(&spec, "1+1", Mode::ZeroInfo, p.m, P0Spec::Honest, &p1p).unwrap();
    let (mut accepts, mut rejects, mut undecided) = (0u32, 0u32, 0u32);
    for t in 0..400 {
        let mut rng = RandomSource::for_trial(42, t);
        let out =
            run_debate(&spec, &p, "1+1", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
        match out.decision {
            Decision::Accept => accepts += 1,
            Decision::Reject => rejects += 1,
            Decision::Undecided => undecided += 1,
        }
    }
    assert!(undecided < 40, "claims at l=1,j=k=1 resolve fast: {undecided}");
    // Aligned claims favor the test by 2^(l-2) = 1/2 at l=1; empirically the
    // reject share sits near one half and must dominate 1/3.
    let decided = accepts + rejects;
    assert!(
        rejects as f64 / decided as f64 > 0.33,
        "rejects {rejects} / decided {decided}"
    );
    assert!(rejects > 0 && accepts > 0);
}

#[test]
fn misaligned_opponent_mostly_fails_against_honest_member() {
    let spec = subset_sum();
    let mut p = params(Mode::ZeroInfo, 1, &spec);
    p.max_steps = 50_000;
    let p1p = build_p1(&spec, "11", Mode::ZeroInfo, P1Spec::Honest).unwrap();
    let p0p =
        build_p0(&spec, "11", Mode::ZeroInfo, p.m, P0Spec::Misaligned { j: 1, k: 2 }, &p1p)
            .unwrap();
    let (mut accepts, mut rejects) = (0u32, 0u32);
    for t in 0..400 {
        let mut rng = RandomSource::for_trial(43, t);
        let out =
            run_debate(&spec, &p, "11", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
        match out.decision {
            Decision::Accept => accepts += 1,
            Decision::Reject => rejects += 1,
            Decision::Undecided => {}
        }
    }
    // Misaligned claims favor acceptance at least 2^(l-1) = 1:1 at l=1; the
    // actual ratio here is above 2.
    assert!(accepts as f64 > 1.2 * rejects as f64, "accepts {accepts} rejects {rejects}");
}

#[test]
fn partial_info_honest_pair_accepts_members_and_refutes_non_members() {
    let spec = token_game();
    let p = params(Mode::PartialInfo, 4, &spec);
    // Members: token counts not divisible by 3.
    for (input, member) in [("1", true), ("11", true), ("111", false), ("1111", true)] {
        let p1_spec = if member { P1Spec::Honest } else { P1Spec::EarlyAccept { round: 1 } };
        let p1p = build_p1(&spec, input, Mode::PartialInfo, p1_spec).unwrap();
        let p0p = build_p0(&spec, input, Mode::PartialInfo, p.m, P0Spec::Honest, &p1p).unwrap();
        let mut rng = RandomSource::from_seed(7);
        let out = run_partial_info(&spec, &p, input, &mut p1p.clone(), &mut p0p.clone(), &mut rng)
            .unwrap();
        let expected = if member { Decision::Accept } else { Decision::Reject };
        assert_eq!(out.decision, expected, "input {input}");
    }
}

#[test]
fn partial_info_choice_deviation_is_caught_by_the_pinned_window_check() {
    let spec = token_game();
    let p = params(Mode::PartialInfo, 4, &spec);
    // On a member long enough to reach a real universal choice, a prover
    // that deviates from the announced move is rejected deterministically.
    let input = "1111";
    let p1p = build_p1(&spec, input, Mode::PartialInfo, P1Spec::HeadError { round: 1 }).unwrap();
    let p0p = build_p0(&spec, input, Mode::PartialInfo, p.m, P0Spec::Honest, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(8);
    let out =
        run_partial_info(&spec, &p, input, &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Reject);
    assert!(out.tally.window_rejects == 1);
}

#[test]
fn restart_mode_halts_fast_and_decides_correctly() {
    let spec = parity();
    let mut p = params(Mode::Cips, 4, &spec);
    p.max_steps = 1_000_000;
    // Member: even number of 1s.
    let p1p = build_p1(&spec, "11", Mode::Cips, P1Spec::Honest).unwrap();
    let p0p = build_p0(&spec, "11", Mode::Cips, p.m, P0Spec::Honest, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(9);
    let out = run_cips(&spec, &p, "11", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Accept);
    assert!(out.tally.restarts > 0, "restarts happen every other move on average");
    assert!(out.steps < 200_000);

    // Non-member with a cheating membership prover: deterministic catch,
    // needs only a short run of continue-coins.
    let p1p = build_p1(&spec, "1", Mode::Cips, P1Spec::EarlyAccept { round: 1 }).unwrap();
    let p0p = build_p0(&spec, "1", Mode::Cips, p.m, P0Spec::Honest, &p1p).unwrap();
    let mut rng = RandomSource::from_seed(10);
    let out = run_cips(&spec, &p, "1", &mut p1p.clone(), &mut p0p.clone(), &mut rng).unwrap();
    assert_eq!(out.decision, Decision::Reject);
}

#[test]
fn reruns_with_the_same_seed_reproduce_the_transcript_exactly() {
    let spec = subset_sum_tight();
    let mut p = params(Mode::ZeroInfo, 2, &spec);
    p.max_steps = 5_000;
    let p1p =
        build_p1(&spec, "1+1", Mode::ZeroInfo, P1Spec::FarCellError { round: 1, index: 1 })
            .unwrap();
    let p0p = build_p0(&spec, "1+1", Mode::ZeroInfo, p.m, P0Spec::Honest, &p1p).unwrap();
    let mut run = |seed: u64| {
        let mut t = Transcript::default();
        let mut rng = RandomSource::from_seed(seed);
        let out = run_debate_observed(
            &spec,
            &p,
            "1+1",
            &mut p1p.clone(),
            &mut p0p.clone(),
            &mut rng,
            Some(&mut t),
            |_, _| {},
        )
        .unwrap();
        (out, t)
    };
    let (o1, t1) = run(77);
    let (o2, t2) = run(77);
    assert_eq!(o1, o2);
    assert_eq!(t1, t2);
    let (o3, t3) = run(78);
    let _ = (o3, t3);
}

#[test]
fn scratch_size_is_constant_across_steps_and_input_lengths() {
    let spec = subset_sum();
    let mut p = params(Mode::ZeroInfo, 2, &spec);
    p.max_steps = 2_000;
    let mut sizes = std::collections::HashSet::new();
    for len in [4usize, 9, 16, 33, 64] {
        let input = "1".repeat(len);
        let p1p =
            build_p1(&spec, &input, Mode::ZeroInfo, P1Spec::EndlessConfig { round: 1 }).unwrap();
        let p0p = build_p0(&spec, &input, Mode::ZeroInfo, p.m, P0Spec::Honest, &p1p).unwrap();
        let mut rng = RandomSource::from_seed(11);
        let _ = run_debate_observed(
            &spec,
            &p,
            &input,
            &mut p1p.clone(),
            &mut p0p.clone(),
            &mut rng,
            None,
            |scratch, _| {
                sizes.insert(scratch.serialized().len());
            },
        )
        .unwrap();
    }
    assert_eq!(sizes.len(), 1, "scratch widths seen: {sizes:?}");
}

#[test]
fn p1_never_reacts_to_private_symbol_changes() {
    // Visibility: scrambling the opponent's private symbols must leave the
    // membership prover's stream untouched (it only ever sees public ones).
    let spec = subset_sum();
    let p = params(Mode::ZeroInfo, 2, &spec);
    let p1p = build_p1(&spec, "11", Mode::ZeroInfo, P1Spec::Honest).unwrap();
    let p0_honest = build_p0(&spec, "11", Mode::ZeroInfo, p.m, P0Spec::Honest, &p1p).unwrap();
    let p0_noise =
        build_p0(&spec, "11", Mode::ZeroInfo, p.m, P0Spec::BadSyntax {
            variant: debatelab_core::debate::SyntaxVariant::TauFirst,
        }, &p1p)
        .unwrap();
    let collect = |p0: &debatelab_core::debate::P0Strategy| {
        let mut t = Transcript::default();
        let mut rng = RandomSource::from_seed(12);
        let mut p = p.clone();
        p.max_steps = 40;
        let _ = run_debate_observed(
            &spec,
            &p,
            "11",
            &mut p1p.clone(),
            &mut p0.clone(),
            &mut rng,
            Some(&mut t),
            |_, _| {},
        );
        t.p1
    };
    let a = collect(&p0_honest);
    let b = collect(&p0_noise);
    let shared = a.len().min(b.len());
    assert!(shared > 0);
    assert_eq!(a[..shared], b[..shared]);
}
