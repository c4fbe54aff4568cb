//! The named strategy catalog and its command-line selector syntax.
//!
//! Selectors look like `honest`, `far-cell-error:round=1,index=2`, or
//! `misaligned:j=1,k=2`.

use std::collections::HashMap;

use thiserror::Error;

use super::p0plan::{self, cheats, P0Strategy};
use super::strategy::{
    honest_p1_tape, tapes, Mode, P1Strategy, PartialCheat, PartialP1, StrategyError,
};
use crate::machines::MachineSpec;

/// Membership-prover selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P1Spec {
    Honest,
    FarCellError { round: usize, index: usize },
    HeadError { round: usize },
    EndlessConfig { round: usize },
    WrongInitial,
    EarlyAccept { round: usize },
}

/// Opposing-prover selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P0Spec {
    Honest,
    Misaligned { j: usize, k: usize },
    FalseInfinity { round: usize },
    Silent,
    BadSyntax { variant: cheats::SyntaxVariant },
}

#[derive(Debug, Error)]
pub enum SelectorError {
    #[error("unknown strategy {0:?}")]
    Unknown(String),
    #[error("bad strategy arguments {0:?}")]
    BadArgs(String),
}

fn parse_args(s: &str) -> Result<HashMap<String, String>, SelectorError> {
    let mut out = HashMap::new();
    if s.is_empty() {
        return Ok(out);
    }
    for part in s.split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return Err(SelectorError::BadArgs(part.to_string()));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn num(args: &HashMap<String, String>, key: &str, default: usize) -> Result<usize, SelectorError> {
    match args.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| SelectorError::BadArgs(format!("{key}={v}"))),
    }
}

impl P1Spec {
    pub fn parse(selector: &str) -> Result<Self, SelectorError> {
        let (name, rest) = selector.split_once(':').unwrap_or((selector, ""));
        let args = parse_args(rest)?;
        Ok(match name {
            "honest" => P1Spec::Honest,
            "far-cell-error" => P1Spec::FarCellError {
                round: num(&args, "round", 1)?,
                index: num(&args, "index", 1)?,
            },
            "head-error" => P1Spec::HeadError { round: num(&args, "round", 1)? },
            "endless-config" => P1Spec::EndlessConfig { round: num(&args, "round", 1)? },
            "wrong-initial" => P1Spec::WrongInitial,
            "early-accept" => P1Spec::EarlyAccept { round: num(&args, "round", 1)? },
            other => return Err(SelectorError::Unknown(other.to_string())),
        })
    }
}

impl P0Spec {
    pub fn parse(selector: &str) -> Result<Self, SelectorError> {
        let (name, rest) = selector.split_once(':').unwrap_or((selector, ""));
        let args = parse_args(rest)?;
        Ok(match name {
            "honest" => P0Spec::Honest,
            "misaligned" => {
                P0Spec::Misaligned { j: num(&args, "j", 1)?, k: num(&args, "k", 2)? }
            }
            "false-infinity" => P0Spec::FalseInfinity { round: num(&args, "round", 1)? },
            "silent" => P0Spec::Silent,
            "bad-syntax" => {
                let variant = match args.get("variant").map(String::as_str) {
                    None | Some("tau-first") => cheats::SyntaxVariant::TauFirst,
                    Some("double-sigma") => cheats::SyntaxVariant::DoubleSigma,
                    Some("infinity-off-delim") => cheats::SyntaxVariant::InfinityOffDelim,
                    Some(v) => return Err(SelectorError::BadArgs(v.to_string())),
                };
                P0Spec::BadSyntax { variant }
            }
            other => return Err(SelectorError::Unknown(other.to_string())),
        })
    }
}

/// Builds the membership prover for a mode.
pub fn build_p1(
    spec: &MachineSpec,
    input: &str,
    mode: Mode,
    sel: P1Spec,
) -> Result<P1Strategy, StrategyError> {
    if mode == Mode::PartialInfo {
        let (cheat, label) = match sel {
            P1Spec::Honest => (PartialCheat::None, "honest".to_string()),
            P1Spec::WrongInitial => (PartialCheat::WrongInitial, "wrong-initial".to_string()),
            P1Spec::HeadError { round } => {
                (PartialCheat::HeadError { round }, format!("head-error:round={round}"))
            }
            P1Spec::EarlyAccept { round } => {
                (PartialCheat::EarlyAccept { round }, format!("early-accept:round={round}"))
            }
            P1Spec::FarCellError { round, .. } => {
                (PartialCheat::FarCell { round }, format!("far-cell-error:round={round}"))
            }
            P1Spec::EndlessConfig { .. } => return Err(StrategyError::BadMode(mode)),
        };
        return Ok(P1Strategy::Partial(PartialP1::build(spec, input, cheat, label)?));
    }
    let tape = match sel {
        P1Spec::Honest => honest_p1_tape(spec, input)?,
        P1Spec::FarCellError { round, index } => tapes::far_cell_error(spec, input, round, index)?,
        P1Spec::HeadError { round } => tapes::head_error(spec, input, round)?,
        P1Spec::EndlessConfig { round } => tapes::endless_config(spec, input, round)?,
        P1Spec::WrongInitial => tapes::wrong_initial(spec)?,
        P1Spec::EarlyAccept { round } => tapes::early_accept(spec, input, round)?,
    };
    Ok(P1Strategy::Tape(tape))
}

/// Builds the opposing prover; it co-simulates `p1` to lay out its plans.
pub fn build_p0(
    spec: &MachineSpec,
    input: &str,
    mode: Mode,
    ruler_m: u32,
    sel: P0Spec,
    p1: &P1Strategy,
) -> Result<P0Strategy, StrategyError> {
    match sel {
        P0Spec::Honest => p0plan::honest_p0(spec, input, mode, ruler_m, p1),
        P0Spec::Misaligned { j, k } => cheats::misaligned(spec, input, mode, ruler_m, j, k, p1),
        P0Spec::FalseInfinity { round } => {
            cheats::false_infinity(spec, input, mode, ruler_m, round, p1)
        }
        P0Spec::Silent => cheats::silent(spec, input, mode, ruler_m, p1),
        P0Spec::BadSyntax { variant } => {
            cheats::bad_syntax(spec, input, mode, ruler_m, variant, p1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_round_trip() {
        assert_eq!(
            P1Spec::parse("far-cell-error:round=1,index=2").unwrap(),
            P1Spec::FarCellError { round: 1, index: 2 }
        );
        assert_eq!(P1Spec::parse("honest").unwrap(), P1Spec::Honest);
        assert_eq!(
            P0Spec::parse("misaligned:j=1,k=2").unwrap(),
            P0Spec::Misaligned { j: 1, k: 2 }
        );
        assert!(P1Spec::parse("bogus").is_err());
        assert!(P0Spec::parse("misaligned:j=x").is_err());
    }
}
