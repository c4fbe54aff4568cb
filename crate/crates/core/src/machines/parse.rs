//! Line-oriented machine description files.
//!
//! ```text
//! # comment lines start with '#'
//! kind: nondeterministic
//! states: q0 q1 qa qr
//! start: q0
//! accept: qa
//! reject: qr
//! modes: q0=e q1=u            (alternating machines only)
//! input_alphabet: 1 +
//! work_alphabet: _ B X        (the `_` token is the blank)
//! space_bound: linear 3       (or: poly <degree> <coeff>; defaults to linear 1)
//! delta: q0 < _ -> q1 B +1 +1
//! ```
//!
//! Input end-markers are written `<` and `>` in `delta` lines.

use std::collections::HashMap;

use thiserror::Error;

use super::spec::{
    CounterParams, InputSymbol, Kind, MachineSpec, SpaceBound, StateId, StateMode, Transition,
    WorkSym,
};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

/// Parses a machine description. `name` is a label for reports and errors.
pub fn parse_machine(name: &str, src: &str) -> Result<MachineSpec, ParseError> {
    let mut kind = None;
    let mut state_names: Vec<String> = Vec::new();
    let mut start = None;
    let mut accept = None;
    let mut reject = None;
    let mut modes_raw: Option<Vec<(String, String, usize)>> = None;
    let mut input_alphabet: Vec<char> = Vec::new();
    let mut work_alphabet: Vec<String> = Vec::new();
    let mut space_bound = SpaceBound::Linear { coeff: 1 };
    let mut counter = None;
    let mut deltas: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            return err(line_no, "expected `section: value`");
        };
        let rest = rest.trim();
        let toks: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        match key.trim() {
            "kind" => {
                kind = Some(match rest {
                    "deterministic" => Kind::Deterministic,
                    "nondeterministic" => Kind::Nondeterministic,
                    "alternating" => Kind::Alternating,
                    other => return err(line_no, format!("unknown kind {other:?}")),
                })
            }
            "states" => state_names = toks,
            "start" => start = Some((rest.to_string(), line_no)),
            "accept" => accept = Some((rest.to_string(), line_no)),
            "reject" => reject = Some((rest.to_string(), line_no)),
            "modes" => {
                let mut pairs = Vec::new();
                for t in &toks {
                    let Some((s, m)) = t.split_once('=') else {
                        return err(line_no, format!("mode entry {t:?} is not `state=e|u`"));
                    };
                    pairs.push((s.to_string(), m.to_string(), line_no));
                }
                modes_raw = Some(pairs);
            }
            "input_alphabet" => {
                for t in &toks {
                    let mut cs = t.chars();
                    let (Some(c), None) = (cs.next(), cs.next()) else {
                        return err(line_no, format!("input symbol {t:?} must be one character"));
                    };
                    if c == '<' || c == '>' {
                        return err(line_no, "`<` and `>` are reserved for end-markers");
                    }
                    input_alphabet.push(c);
                }
            }
            "work_alphabet" => work_alphabet = toks,
            "space_bound" => match toks.as_slice() {
                [k, c] if k == "linear" => match c.parse() {
                    Ok(coeff) => space_bound = SpaceBound::Linear { coeff },
                    Err(_) => return err(line_no, "bad linear coefficient"),
                },
                [k, d, c] if k == "poly" => match (d.parse(), c.parse()) {
                    (Ok(degree), Ok(coeff)) => space_bound = SpaceBound::Poly { degree, coeff },
                    _ => return err(line_no, "bad poly parameters"),
                },
                _ => return err(line_no, "expected `linear <coeff>` or `poly <deg> <coeff>`"),
            },
            "counter" => match rest.parse() {
                Ok(c) => counter = Some(CounterParams { c }),
                Err(_) => return err(line_no, "bad counter parameter"),
            },
            "delta" => deltas.push((line_no, toks)),
            other => return err(line_no, format!("unknown section {other:?}")),
        }
    }

    let Some(kind) = kind else {
        return err(0, "missing `kind:` section");
    };
    if state_names.is_empty() {
        return err(0, "missing `states:` section");
    }
    let state_index: HashMap<&str, StateId> = state_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), StateId(i as u16)))
        .collect();
    let work_index: HashMap<&str, WorkSym> = work_alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), WorkSym(i as u16)))
        .collect();

    let lookup_state = |named: Option<(String, usize)>, what: &str| match named {
        Some((s, line)) => match state_index.get(s.as_str()) {
            Some(&id) => Ok(id),
            None => err(line, format!("unknown state {s:?}")),
        },
        None => err(0, format!("missing `{what}:` section")),
    };
    let start = lookup_state(start, "start")?;
    let accept = lookup_state(accept, "accept")?;
    let reject = lookup_state(reject, "reject")?;

    let Some(&blank) = work_index.get("_") else {
        return err(0, "work alphabet must contain the blank token `_`");
    };

    let modes = match modes_raw {
        None => None,
        Some(pairs) => {
            let mut table = vec![StateMode::Existential; state_names.len()];
            for (s, m, line) in pairs {
                let Some(&id) = state_index.get(s.as_str()) else {
                    return err(line, format!("unknown state {s:?} in modes"));
                };
                table[id.0 as usize] = match m.as_str() {
                    "e" => StateMode::Existential,
                    "u" => StateMode::Universal,
                    other => return err(line, format!("mode must be e or u, got {other:?}")),
                };
            }
            Some(table)
        }
    };

    let mut transitions = Vec::new();
    for (line, toks) in deltas {
        let [from, input, read, arrow, to, write, d_in, d_work] = toks.as_slice() else {
            return err(line, "expected `delta: q s w -> q' w' dIn dWork`");
        };
        if arrow != "->" {
            return err(line, "expected `->` between the two transition halves");
        }
        let get_state = |s: &str| {
            state_index
                .get(s)
                .copied()
                .ok_or_else(|| ParseError { line, msg: format!("unknown state {s:?}") })
        };
        let get_work = |s: &str| {
            work_index
                .get(s)
                .copied()
                .ok_or_else(|| ParseError { line, msg: format!("unknown work symbol {s:?}") })
        };
        let input = match input.as_str() {
            "<" => InputSymbol::LeftEnd,
            ">" => InputSymbol::RightEnd,
            s => {
                let mut cs = s.chars();
                let (Some(c), None) = (cs.next(), cs.next()) else {
                    return err(line, format!("input symbol {s:?} must be one character"));
                };
                InputSymbol::Sym(c)
            }
        };
        let dir = |s: &str| -> Result<i8, ParseError> {
            match s {
                "-1" => Ok(-1),
                "0" => Ok(0),
                "+1" | "1" => Ok(1),
                other => err(line, format!("direction {other:?} must be -1, 0, or +1")),
            }
        };
        transitions.push(Transition {
            from: get_state(from)?,
            input,
            read: get_work(read)?,
            to: get_state(to)?,
            write: get_work(write)?,
            d_input: dir(d_in)?,
            d_work: dir(d_work)?,
        });
    }

    Ok(MachineSpec {
        name: name.to_string(),
        kind,
        state_names,
        start,
        accept,
        reject,
        modes,
        input_alphabet,
        work_alphabet,
        blank,
        transitions,
        space_bound,
        counter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_line_numbers() {
        let src = "kind: deterministic\nstates: q0 qa qr\nstart: q0\naccept: qa\nreject: qr\nwork_alphabet: _\ndelta: q0 < _ -> qq _ 0 0\n";
        let e = parse_machine("m", src).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.msg.contains("qq"));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let src = "# a machine\n\nkind: deterministic\nstates: q0 qa qr\nstart: q0\naccept: qa\nreject: qr\ninput_alphabet: a\nwork_alphabet: _\ndelta: q0 < _ -> qa _ 0 0\n";
        let m = parse_machine("m", src).unwrap();
        assert_eq!(m.transitions.len(), 1);
        assert_eq!(m.space_bound, SpaceBound::Linear { coeff: 1 });
    }
}
