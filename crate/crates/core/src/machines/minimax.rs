//! Game-tree evaluation for alternating machines.
//!
//! An alternating machine's run is a two-player game: the existential player
//! picks moves at existential states, the universal player at universal
//! ones. The machine accepts the input iff the existential player has a
//! winning strategy.

use std::collections::HashMap;

use thiserror::Error;

use super::config::{initial_configuration, successors, Configuration};
use super::search::input_tape;
use super::spec::{InputSymbol, Kind, MachineSpec, StateMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameValue {
    Accept,
    Reject,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("depth budget {0} exhausted before the game resolved")]
    DepthExhausted(usize),
    #[error("machine is not alternating")]
    NotAlternating,
    #[error(transparent)]
    Machine(#[from] super::spec::MachineError),
}

/// The existential player's winning strategy: at existential positions one
/// chosen move, at universal positions an answer for every choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyTree {
    /// An accepting configuration was reached.
    Accepting,
    /// Existential position: take choice `choice`, producing `config`.
    Exist { choice: usize, config: Configuration, next: Box<StrategyTree> },
    /// Universal position: one branch per opponent choice index, carrying
    /// the configuration that choice produces.
    Univ { branches: Vec<(usize, Configuration, Box<StrategyTree>)> },
}

type Memo = HashMap<(Configuration, usize), GameValue>;

fn eval(
    spec: &MachineSpec,
    tape: &[InputSymbol],
    ceiling: Option<u128>,
    memo: &mut Memo,
    cfg: &Configuration,
    head: usize,
    depth: usize,
) -> Result<GameValue, GameError> {
    if cfg.is_accepting(spec) {
        return Ok(GameValue::Accept);
    }
    if spec.is_halting(cfg.state()) {
        return Ok(GameValue::Reject);
    }
    if let Some(&v) = memo.get(&(cfg.clone(), head)) {
        return Ok(v);
    }
    if depth == 0 {
        return Err(GameError::DepthExhausted(depth));
    }
    let succ = successors(spec, cfg, tape[head], ceiling);
    if succ.is_empty() {
        // Dead position (budget or missing transitions): the membership
        // claimant loses.
        memo.insert((cfg.clone(), head), GameValue::Reject);
        return Ok(GameValue::Reject);
    }
    let mode = spec.mode(cfg.state()).unwrap_or(StateMode::Existential);
    let mut value = match mode {
        StateMode::Existential => GameValue::Reject,
        StateMode::Universal => GameValue::Accept,
    };
    for s in &succ {
        let h = (head as isize + s.d_input as isize) as usize;
        let v = eval(spec, tape, ceiling, memo, &s.config, h, depth - 1)?;
        match (mode, v) {
            (StateMode::Existential, GameValue::Accept) => {
                value = GameValue::Accept;
                break;
            }
            (StateMode::Universal, GameValue::Reject) => {
                value = GameValue::Reject;
                break;
            }
            _ => {}
        }
    }
    memo.insert((cfg.clone(), head), value);
    Ok(value)
}

fn ceiling_of(spec: &MachineSpec, input: &str) -> Result<Option<u128>, GameError> {
    Ok(match spec.counter {
        Some(p) => Some(p.ceiling(spec.space_bound, input.len().max(1))?),
        None => None,
    })
}

/// Exhaustive minimax value of the configuration game.
pub fn game_value(
    spec: &MachineSpec,
    input: &str,
    max_depth: usize,
) -> Result<GameValue, GameError> {
    if spec.kind != Kind::Alternating {
        return Err(GameError::NotAlternating);
    }
    let ceiling = ceiling_of(spec, input)?;
    let tape = input_tape(input);
    let mut memo = Memo::new();
    eval(spec, &tape, ceiling, &mut memo, &initial_configuration(spec), 0, max_depth)
}

/// A reusable memoized evaluator for mid-game positions; the refuting
/// player's announcement policy queries it per claimed configuration.
pub struct GameOracle {
    spec: MachineSpec,
    tape: Vec<InputSymbol>,
    ceiling: Option<u128>,
    memo: Memo,
    depth: usize,
}

impl GameOracle {
    pub fn new(spec: &MachineSpec, input: &str, depth: usize) -> Result<Self, GameError> {
        if spec.kind != Kind::Alternating {
            return Err(GameError::NotAlternating);
        }
        Ok(GameOracle {
            spec: spec.clone(),
            tape: input_tape(input),
            ceiling: ceiling_of(spec, input)?,
            memo: Memo::new(),
            depth,
        })
    }

    pub fn value_at(
        &mut self,
        cfg: &Configuration,
        head: usize,
    ) -> Result<GameValue, GameError> {
        eval(&self.spec, &self.tape, self.ceiling, &mut self.memo, cfg, head, self.depth)
    }

    /// The universal choice that refutes the membership claim from this
    /// position, when one exists; otherwise choice 0. Ties break low.
    pub fn refuting_choice(&mut self, cfg: &Configuration, head: usize) -> u8 {
        if head >= self.tape.len() {
            return 0;
        }
        let succ = successors(&self.spec, cfg, self.tape[head], self.ceiling);
        for s in &succ {
            let h = (head as isize + s.d_input as isize) as usize;
            if h < self.tape.len() {
                if let Ok(GameValue::Reject) =
                    eval(&self.spec, &self.tape, self.ceiling, &mut self.memo, &s.config, h, self.depth)
                {
                    return s.choice.min(1) as u8;
                }
            }
        }
        0
    }
}

/// Builds the existential player's winning strategy tree, or `None` when
/// the input is not accepted within the depth budget.
pub fn accepting_strategy_tree(
    spec: &MachineSpec,
    input: &str,
    max_depth: usize,
) -> Result<Option<StrategyTree>, GameError> {
    if spec.kind != Kind::Alternating {
        return Err(GameError::NotAlternating);
    }
    let ceiling = ceiling_of(spec, input)?;
    let tape = input_tape(input);
    let mut memo = Memo::new();
    let init = initial_configuration(spec);
    match eval(spec, &tape, ceiling, &mut memo, &init, 0, max_depth)? {
        GameValue::Reject => Ok(None),
        GameValue::Accept => {
            Ok(Some(build_tree(spec, &tape, ceiling, &mut memo, &init, 0, max_depth)?))
        }
    }
}

fn build_tree(
    spec: &MachineSpec,
    tape: &[InputSymbol],
    ceiling: Option<u128>,
    memo: &mut Memo,
    cfg: &Configuration,
    head: usize,
    depth: usize,
) -> Result<StrategyTree, GameError> {
    if cfg.is_accepting(spec) {
        return Ok(StrategyTree::Accepting);
    }
    if depth == 0 {
        return Err(GameError::DepthExhausted(depth));
    }
    let succ = successors(spec, cfg, tape[head], ceiling);
    let mode = spec.mode(cfg.state()).unwrap_or(StateMode::Existential);
    match mode {
        StateMode::Existential => {
            for s in &succ {
                let h = (head as isize + s.d_input as isize) as usize;
                if eval(spec, tape, ceiling, memo, &s.config, h, depth - 1)? == GameValue::Accept {
                    let next = build_tree(spec, tape, ceiling, memo, &s.config, h, depth - 1)?;
                    return Ok(StrategyTree::Exist {
                        choice: s.choice,
                        config: s.config.clone(),
                        next: Box::new(next),
                    });
                }
            }
            unreachable!("accepting position without an accepting choice")
        }
        StateMode::Universal => {
            let mut branches = Vec::with_capacity(succ.len());
            for s in &succ {
                let h = (head as isize + s.d_input as isize) as usize;
                let next = build_tree(spec, tape, ceiling, memo, &s.config, h, depth - 1)?;
                branches.push((s.choice, s.config.clone(), Box::new(next)));
            }
            Ok(StrategyTree::Univ { branches })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::parse_machine;

    /// Depth-2 game: the existential player picks a symbol, the universal
    /// player then decides between two states, one of which accepts only if
    /// the existential player chose well.
    fn depth_two_game(win: bool) -> MachineSpec {
        let u2 = if win { "qa" } else { "qr" };
        parse_machine(
            "game",
            &format!(
                "\
kind: alternating
states: q0 q1 qa qr
start: q0
accept: qa
reject: qr
modes: q0=e q1=u
input_alphabet: a
work_alphabet: _ X Y
space_bound: linear 1
delta: q0 < _ -> q1 X 0 0
delta: q0 < _ -> q1 Y 0 0
delta: q1 < X -> qa X 0 0
delta: q1 < X -> {u2} X 0 0
delta: q1 < Y -> qr Y 0 0
delta: q1 < Y -> qr Y 0 0
"
            ),
        )
        .unwrap()
    }

    #[test]
    fn accepting_game_yields_tree_covering_both_branches() {
        let spec = depth_two_game(true);
        let tree = accepting_strategy_tree(&spec, "", 8).unwrap().unwrap();
        let StrategyTree::Exist { choice, next, .. } = tree else {
            panic!("root must be existential");
        };
        assert_eq!(choice, 0, "the X opening is the winning one");
        let StrategyTree::Univ { branches } = *next else {
            panic!("second level must be universal");
        };
        assert_eq!(branches.len(), 2);
    }

    #[test]
    fn rejecting_game_has_no_tree() {
        let spec = depth_two_game(false);
        assert_eq!(accepting_strategy_tree(&spec, "", 8).unwrap(), None);
        assert_eq!(game_value(&spec, "", 8).unwrap(), GameValue::Reject);
    }

    #[test]
    fn immediate_acceptor_gives_single_node_tree() {
        let spec = parse_machine(
            "imm",
            "\
kind: alternating
states: q0 qa qr
start: q0
accept: qa
reject: qr
modes: q0=e
input_alphabet: a
work_alphabet: _
space_bound: linear 1
delta: q0 < _ -> qa _ 0 0
delta: q0 < _ -> qa _ 0 0
",
        )
        .unwrap();
        let tree = accepting_strategy_tree(&spec, "a", 4).unwrap().unwrap();
        assert!(matches!(tree, StrategyTree::Exist { ref next, .. } if **next == StrategyTree::Accepting));
    }

    #[test]
    fn oracle_refutes_the_losing_branch() {
        let spec = depth_two_game(false);
        let mut oracle = GameOracle::new(&spec, "", 16).unwrap();
        let init = initial_configuration(&spec);
        assert_eq!(oracle.value_at(&init, 0).unwrap(), GameValue::Reject);
    }
}
