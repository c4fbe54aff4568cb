//! The machine description type and its validation rules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a machine state in [`MachineSpec::state_names`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub u16);

/// Index of a work-tape symbol in [`MachineSpec::work_alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WorkSym(pub u16);

/// A symbol scanned on the read-only input tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputSymbol {
    /// The left end-marker.
    LeftEnd,
    /// The right end-marker.
    RightEnd,
    Sym(char),
}

impl InputSymbol {
    pub fn render(&self) -> String {
        match self {
            InputSymbol::LeftEnd => "<".to_string(),
            InputSymbol::RightEnd => ">".to_string(),
            InputSymbol::Sym(c) => c.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Deterministic,
    Nondeterministic,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateMode {
    Existential,
    Universal,
}

/// Declared space bound family, `s(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceBound {
    Linear { coeff: u32 },
    Poly { degree: u32, coeff: u32 },
}

impl SpaceBound {
    /// Evaluates `s(n)`.
    pub fn eval(&self, n: usize) -> u64 {
        match *self {
            SpaceBound::Linear { coeff } => coeff as u64 * n as u64,
            SpaceBound::Poly { degree, coeff } => {
                coeff as u64 * (n as u64).pow(degree)
            }
        }
    }

    /// Linear bounds get the deterministic input-ruler infinity check;
    /// anything superlinear gets the coin-based loop.
    pub fn is_linear(&self) -> bool {
        matches!(
            *self,
            SpaceBound::Linear { .. } | SpaceBound::Poly { degree: 1, .. }
        )
    }
}

/// Step-counting track parameters: the instrumented machine halts rejecting
/// once `2^(c * s(n))` actions have been performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterParams {
    pub c: u32,
}

impl CounterParams {
    /// `2^(c * s(n))`, the per-input action budget.
    pub fn ceiling(&self, bound: SpaceBound, n: usize) -> Result<u128, MachineError> {
        let bits = self.c as u64 * bound.eval(n);
        if bits == 0 || bits > super::MAX_COUNTER_BITS as u64 {
            return Err(MachineError::CounterWidth { bits });
        }
        Ok(1u128 << bits)
    }
}

/// One transition relation entry. `d_input` and `d_work` are in `{-1,0,+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: StateId,
    pub input: InputSymbol,
    pub read: WorkSym,
    pub to: StateId,
    pub write: WorkSym,
    pub d_input: i8,
    pub d_work: i8,
}

/// A small single-work-tape machine with a separate read-only input tape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub name: String,
    pub kind: Kind,
    pub state_names: Vec<String>,
    pub start: StateId,
    pub accept: StateId,
    pub reject: StateId,
    /// One mode per state; present only for alternating machines.
    pub modes: Option<Vec<StateMode>>,
    pub input_alphabet: Vec<char>,
    /// Work-tape symbol names; `blank` indexes into this list.
    pub work_alphabet: Vec<String>,
    pub blank: WorkSym,
    /// Entries in declaration order; the order doubles as the canonical
    /// choice index for alternating machines and for tie-breaking.
    pub transitions: Vec<Transition>,
    pub space_bound: SpaceBound,
    /// Step-counter track; `None` means uninstrumented.
    pub counter: Option<CounterParams>,
}

/// A violated invariant found by [`validate_machine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: &'static str,
    pub detail: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("machine fails validation: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("counter track would need {bits} bits; the supported width is 1..=120")]
    CounterWidth { bits: u64 },
    #[error("input symbol {0:?} is not in the machine's input alphabet")]
    UnknownInput(char),
}

impl MachineSpec {
    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.0 as usize]
    }

    pub fn work_name(&self, w: WorkSym) -> &str {
        &self.work_alphabet[w.0 as usize]
    }

    pub fn is_halting(&self, s: StateId) -> bool {
        s == self.accept || s == self.reject
    }

    pub fn mode(&self, s: StateId) -> Option<StateMode> {
        self.modes.as_ref().map(|m| m[s.0 as usize])
    }

    /// Transitions out of `from` that read `(input, work)`, in declaration
    /// order. The position in the returned list is the choice index.
    pub fn choices(
        &self,
        from: StateId,
        input: InputSymbol,
        work: WorkSym,
    ) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions
            .iter()
            .filter(move |t| t.from == from && t.input == input && t.read == work)
            .enumerate()
    }

    /// Checks that an input string uses only declared symbols.
    pub fn check_input(&self, input: &str) -> Result<(), MachineError> {
        match input.chars().find(|c| !self.input_alphabet.contains(c)) {
            Some(c) => Err(MachineError::UnknownInput(c)),
            None => Ok(()),
        }
    }

    /// Whether the machine's bound family uses the deterministic ruler check.
    pub fn linear_regime(&self) -> bool {
        self.space_bound.is_linear()
    }
}

/// Checks every structural invariant; an empty list means the spec is valid.
pub fn validate_machine(spec: &MachineSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |rule: &'static str, detail: String| out.push(Diagnostic { rule, detail });

    let n_states = spec.state_names.len();
    for (role, id) in [
        ("start", spec.start),
        ("accept", spec.accept),
        ("reject", spec.reject),
    ] {
        if id.0 as usize >= n_states {
            push("designated-state", format!("{role} state index out of range"));
        }
    }
    if spec.blank.0 as usize >= spec.work_alphabet.len() {
        push("blank-symbol", "blank is not in the work alphabet".into());
    }
    if spec.accept == spec.reject {
        push("designated-state", "accept and reject must differ".into());
    }

    for (i, t) in spec.transitions.iter().enumerate() {
        if t.from.0 as usize >= n_states || t.to.0 as usize >= n_states {
            push("transition-states", format!("entry {i} references an unknown state"));
            continue;
        }
        if t.read.0 as usize >= spec.work_alphabet.len()
            || t.write.0 as usize >= spec.work_alphabet.len()
        {
            push("transition-symbols", format!("entry {i} references an unknown work symbol"));
        }
        if let InputSymbol::Sym(c) = t.input {
            if !spec.input_alphabet.contains(&c) {
                push("transition-symbols", format!("entry {i} reads undeclared input {c:?}"));
            }
        }
        if !(-1..=1).contains(&t.d_input) || !(-1..=1).contains(&t.d_work) {
            push("transition-direction", format!("entry {i} has a direction outside -1..=+1"));
        }
        if spec.is_halting(t.from) {
            push(
                "halting-outgoing",
                format!(
                    "entry {i} leaves halting state {}",
                    spec.state_name(t.from)
                ),
            );
        }
    }

    match spec.kind {
        Kind::Deterministic => {
            // At most one entry per (state, input, work).
            let mut seen = std::collections::HashSet::new();
            for (i, t) in spec.transitions.iter().enumerate() {
                if !seen.insert((t.from, t.input, t.read)) {
                    push(
                        "deterministic-choice",
                        format!("entry {i} duplicates a (state, input, work) key"),
                    );
                }
            }
            if spec.modes.is_some() {
                push("modes-kind", "only alternating machines carry state modes".into());
            }
        }
        Kind::Nondeterministic => {
            if spec.modes.is_some() {
                push("modes-kind", "only alternating machines carry state modes".into());
            }
        }
        Kind::Alternating => match &spec.modes {
            None => push("modes-missing", "alternating machines need a modes table".into()),
            Some(modes) => {
                if modes.len() != n_states {
                    push("modes-missing", "modes table length differs from state count".into());
                } else {
                    if modes[spec.start.0 as usize] != StateMode::Existential {
                        push("start-mode", "the start state must be existential".into());
                    }
                    for (i, t) in spec.transitions.iter().enumerate() {
                        if !spec.is_halting(t.to)
                            && modes[t.from.0 as usize] == modes[t.to.0 as usize]
                        {
                            push(
                                "mode-alternation",
                                format!(
                                    "entry {i} connects two {:?} states",
                                    modes[t.from.0 as usize]
                                ),
                            );
                        }
                    }
                    // Exactly two outgoing choices per (input, work) key that
                    // has any transition at all; keys with none are treated
                    // as unreachable by promise.
                    let mut groups: std::collections::HashMap<_, usize> =
                        std::collections::HashMap::new();
                    for t in &spec.transitions {
                        *groups.entry((t.from, t.input, t.read)).or_default() += 1;
                    }
                    for ((from, input, read), count) in groups {
                        if count != 2 {
                            push(
                                "two-choices",
                                format!(
                                    "state {} has {count} choice(s) on ({}, {})",
                                    spec.state_name(from),
                                    input.render(),
                                    spec.work_name(read)
                                ),
                            );
                        }
                    }
                }
            }
        },
    }

    out
}

/// Attaches a step-counter track. The counter increments after each action;
/// the machine halts rejecting when it reaches `2^(c * s(n))`. First-track
/// behavior is otherwise unchanged.
pub fn instrument_with_counter(
    spec: &MachineSpec,
    params: CounterParams,
) -> Result<MachineSpec, MachineError> {
    let diags = validate_machine(spec);
    if !diags.is_empty() {
        return Err(MachineError::Invalid(diags));
    }
    // Smallest nonempty input must already fit the supported track width.
    params.ceiling(spec.space_bound, 1)?;
    let mut out = spec.clone();
    out.counter = Some(params);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::parse_machine;

    pub(crate) const THREE_STATE_DET: &str = "\
kind: deterministic
states: q0 q1 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _ X
space_bound: linear 1
delta: q0 < _ -> q1 X +1 0
delta: q1 a X -> qa X 0 0
";

    #[test]
    fn well_formed_deterministic_machine_has_no_diagnostics() {
        let spec = parse_machine("det", THREE_STATE_DET).unwrap();
        assert_eq!(validate_machine(&spec), vec![]);
    }

    #[test]
    fn universal_start_state_is_flagged() {
        let src = "\
kind: alternating
states: q0 q1 qa qr
start: q0
accept: qa
reject: qr
modes: q0=u q1=e
input_alphabet: a
work_alphabet: _
space_bound: linear 1
delta: q0 < _ -> q1 _ 0 0
delta: q0 < _ -> q1 _ +1 0
delta: q1 a _ -> qa _ 0 0
delta: q1 a _ -> qr _ 0 0
";
        let spec = parse_machine("alt", src).unwrap();
        let diags = validate_machine(&spec);
        assert!(diags.iter().any(|d| d.rule == "start-mode"), "{diags:?}");
    }

    #[test]
    fn transition_out_of_accept_is_flagged() {
        let src = "\
kind: nondeterministic
states: q0 qa qr
start: q0
accept: qa
reject: qr
input_alphabet: a
work_alphabet: _
space_bound: linear 1
delta: q0 < _ -> qa _ 0 0
delta: qa a _ -> q0 _ 0 0
";
        let spec = parse_machine("bad", src).unwrap();
        let diags = validate_machine(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, "halting-outgoing");
    }

    #[test]
    fn counter_width_is_bounded() {
        let spec = parse_machine("det", THREE_STATE_DET).unwrap();
        let err = CounterParams { c: 121 }.ceiling(spec.space_bound, 8).unwrap_err();
        assert!(matches!(err, MachineError::CounterWidth { .. }));
        assert!(instrument_with_counter(&spec, CounterParams { c: 2 }).is_ok());
    }
}
