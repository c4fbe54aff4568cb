//! Exhaustive cross-validation of the local window predicates against the
//! real single-move semantics on desk-scale machines.
//!
//! For every reachable configuration pair produced by `successors`, the
//! head-window check and the same-index triple predicate must hold
//! everywhere. For pairs that are *not* one move apart, some index must
//! expose them, unless the difference is only visible through input-head
//! tracking.

use debatelab_core::machines::{
    generate_acp, head_windows_consistent, initial_configuration, instrument_with_counter,
    parse_machine, successors, triple_pair_legitimate, triple_pair_spanned, window_at_head,
    Configuration, CounterParams, InputSymbol, MachineSpec, Span, TapeSymbol, Triple, WindowSlot,
};
use std::collections::HashSet;

fn machines() -> Vec<MachineSpec> {
    let texts = [
        // Genuinely nondeterministic, writes two symbols, moves both ways.
        "\
kind: nondeterministic
states: q0 q1 q2 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a b
work_alphabet: _ X Y
space_bound: linear 2
delta: q0 < _ -> q1 X +1 +1
delta: q0 < _ -> q2 Y +1 0
delta: q1 a _ -> q1 X +1 +1
delta: q1 b _ -> q2 Y 0 -1
delta: q1 > _ -> qa _ 0 0
delta: q2 a Y -> q1 Y +1 +1
delta: q2 a X -> q2 X 0 -1
delta: q2 b Y -> qa Y 0 0
delta: q2 > X -> qa X 0 0
delta: q2 > Y -> qr Y 0 0
",
        // Deterministic zig-zag with left moves.
        "\
kind: deterministic
states: q0 q1 q2 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _ M X
space_bound: linear 2
delta: q0 < _ -> q1 M +1 +1
delta: q1 a _ -> q1 X +1 +1
delta: q1 > X -> q2 X 0 -1
delta: q2 a X -> q2 X 0 -1
delta: q2 a M -> qa M 0 0
delta: q2 > X -> q2 X 0 -1
delta: q2 > M -> qa M 0 0
",
    ];
    let mut out = Vec::new();
    for (i, t) in texts.iter().enumerate() {
        let spec = parse_machine(&format!("m{i}"), t).unwrap();
        assert!(debatelab_core::machines::validate_machine(&spec).is_empty());
        out.push(spec.clone());
        out.push(instrument_with_counter(&spec, CounterParams { c: 1 }).unwrap());
        out.push(instrument_with_counter(&spec, CounterParams { c: 2 }).unwrap());
    }
    out
}

fn input_tape(input: &str) -> Vec<InputSymbol> {
    let mut v = vec![InputSymbol::LeftEnd];
    v.extend(input.chars().map(InputSymbol::Sym));
    v.push(InputSymbol::RightEnd);
    v
}

fn ceiling(spec: &MachineSpec, n: usize) -> Option<u128> {
    spec.counter.map(|p| p.ceiling(spec.space_bound, n.max(1)).unwrap())
}

/// All (configuration, head) nodes reachable within `depth` moves.
fn reachable(spec: &MachineSpec, input: &str, depth: usize) -> Vec<(Configuration, usize)> {
    let tape = input_tape(input);
    let ceil = ceiling(spec, input.len());
    let mut seen = HashSet::new();
    let mut frontier = vec![(initial_configuration(spec), 0usize)];
    let mut all = frontier.clone();
    seen.insert((frontier[0].0.clone(), 0usize));
    for _ in 0..depth {
        let mut next = Vec::new();
        for (cfg, head) in &frontier {
            for s in successors(spec, cfg, tape[*head], ceil) {
                let h = (*head as isize + s.d_input as isize) as usize;
                if seen.insert((s.config.clone(), h)) {
                    next.push((s.config.clone(), h));
                    all.push((s.config, h));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    all
}

fn triple_at(c: &Configuration, idx: usize) -> Triple {
    let slot = |i: usize| match c.syms.get(i - 1) {
        Some(&s) => WindowSlot::Sym(s),
        None => WindowSlot::Pad,
    };
    [slot(idx), slot(idx + 1), slot(idx + 2)]
}

fn indices(a: &Configuration, b: &Configuration) -> std::ops::RangeInclusive<usize> {
    1..=a.syms.len().max(b.syms.len())
}

fn pair_passes_everywhere(spec: &MachineSpec, a: &Configuration, b: &Configuration) -> bool {
    indices(a, b).all(|i| {
        let pass = triple_pair_legitimate(spec, &triple_at(a, i), &triple_at(b, i));
        let anchored_pass = i != 1
            || triple_pair_spanned(
                spec,
                &triple_at(a, 1),
                &triple_at(b, 1),
                Span::One,
                None,
                true,
            );
        pass && anchored_pass
    })
}

#[test]
fn successor_pairs_pass_all_predicates() {
    for spec in machines() {
        for input in ["", "a", "ab", "aab", "abab"] {
            if input.chars().any(|c| !spec.input_alphabet.contains(&c)) {
                continue;
            }
            let tape = input_tape(input);
            let ceil = ceiling(&spec, input.len());
            for (cfg, head) in reachable(&spec, input, 10) {
                for s in successors(&spec, &cfg, tape[head], ceil) {
                    let w0 = window_at_head(&cfg);
                    let w1 = window_at_head(&s.config);
                    assert!(
                        head_windows_consistent(&spec, &w0, &w1, tape[head], Span::One, None),
                        "{}: window check rejected a real move\n{cfg:?}\n-> {:?}",
                        spec.name,
                        s.config
                    );
                    assert!(
                        head_windows_consistent(
                            &spec,
                            &w0,
                            &w1,
                            tape[head],
                            Span::One,
                            Some(s.choice)
                        ),
                        "{}: choice-pinned window check rejected its own move",
                        spec.name
                    );
                    assert!(
                        pair_passes_everywhere(&spec, &cfg, &s.config),
                        "{}: triple predicate rejected a real pair\n{cfg:?}\n-> {:?}",
                        spec.name,
                        s.config
                    );
                }
            }
        }
    }
}

/// Mutates one cell (first track or counter digit) away from both markers.
fn far_cell_mutations(spec: &MachineSpec, b: &Configuration) -> Vec<Configuration> {
    let mut out = Vec::new();
    for (i, sym) in b.syms.iter().enumerate() {
        if let TapeSymbol::Cell { sym: w, digit } = *sym {
            for alt in 0..spec.work_alphabet.len() as u16 {
                if alt != w.0 {
                    let mut m = b.clone();
                    m.syms[i] = TapeSymbol::Cell {
                        sym: debatelab_core::machines::WorkSym(alt),
                        digit,
                    };
                    out.push(m);
                }
            }
            if let Some(d) = digit {
                let max = (1u8 << spec.counter.map(|p| p.c).unwrap_or(1)) - 1;
                for alt in 0..=max {
                    if alt != d {
                        let mut m = b.clone();
                        m.syms[i] = TapeSymbol::Cell { sym: w, digit: Some(alt) };
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn mutated_pairs_fail_somewhere() {
    for spec in machines() {
        for input in ["a", "ab"] {
            if input.chars().any(|c| !spec.input_alphabet.contains(&c)) {
                continue;
            }
            let tape = input_tape(input);
            let ceil = ceiling(&spec, input.len());
            for (cfg, head) in reachable(&spec, input, 8) {
                let real: Vec<Configuration> = successors(&spec, &cfg, tape[head], ceil)
                    .into_iter()
                    .map(|s| s.config)
                    .collect();
                for r in &real {
                    for m in far_cell_mutations(&spec, r) {
                        if real.contains(&m) {
                            continue; // mutation happened to be another legal move
                        }
                        // Canonical-form mutations only; trailing-trim
                        // artifacts are not stream-expressible.
                        if m.syms.len() > 1 {
                            if let TapeSymbol::Cell { sym, digit } = *m.syms.last().unwrap() {
                                if sym == spec.blank && digit.unwrap_or(0) == 0 {
                                    continue;
                                }
                            }
                        }
                        let caught_window = !head_windows_consistent(
                            &spec,
                            &window_at_head(&cfg),
                            &window_at_head(&m),
                            tape[head],
                            Span::One,
                            None,
                        );
                        let caught_triple = !pair_passes_everywhere(&spec, &cfg, &m);
                        assert!(
                            caught_window || caught_triple,
                            "{}: undetected mutation\nfrom {cfg:?}\nreal {r:?}\nfake {m:?}",
                            spec.name
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn acp_round_trips_through_successors() {
    for spec in machines() {
        for input in ["", "a", "ab"] {
            if input.chars().any(|c| !spec.input_alphabet.contains(&c)) {
                continue;
            }
            if let Ok(Some(path)) = generate_acp(&spec, input, 64, 1 << 16) {
                let heads = debatelab_core::machines::replay_heads(&spec, input, &path);
                assert!(heads.is_some(), "{}: ACP failed to replay", spec.name);
            }
        }
    }
}
