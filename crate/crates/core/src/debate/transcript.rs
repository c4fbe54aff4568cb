//! Transcripts and visibility projections.
//!
//! Symbols alternate strictly, the membership prover moving first: its
//! `i`-th symbol precedes the opponent's `i`-th. Before preparing its `i`-th
//! symbol, the membership prover has seen the public symbols among its
//! opponent's first `i-1` emissions; the opponent has seen all of the
//! membership prover's first `i` (they are all public).

use thiserror::Error;

use super::alphabet::{P0Symbol, PublicSymbol};
use crate::machines::MachineSpec;

/// Which prover emitted a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    P1,
    P0,
}

/// The full interleaved record of one debate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub p1: Vec<PublicSymbol>,
    pub p0: Vec<P0Symbol>,
    /// Verifier coin announcements (restart mode); entry `i` follows the
    /// `i`-th exchanged pair.
    pub coins: Vec<bool>,
}

/// An ordered view of the public symbols one prover has seen, tagged with
/// origin and the emitter's 1-based index.
pub type VisibleHistory = Vec<(Origin, usize, PublicSymbol)>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("projection index {i} outside the emitted prefix (len {len})")]
    OutOfRange { i: usize, len: usize },
}

impl Transcript {
    pub fn push_p1(&mut self, s: PublicSymbol) {
        self.p1.push(s);
        debug_assert!(self.p1.len() - self.p0.len() == 1);
    }

    pub fn push_p0(&mut self, s: P0Symbol) {
        self.p0.push(s);
        debug_assert!(self.p1.len() == self.p0.len());
    }

    /// Everything the membership prover may consult before emitting its
    /// `i`-th symbol (1-based): its own first `i-1` symbols merged, in
    /// emission order, with the public symbols among the opponent's first
    /// `i-1`.
    pub fn project_for_p1(&self, i: usize) -> Result<VisibleHistory, TranscriptError> {
        if i == 0 || i > self.p1.len() + 1 {
            return Err(TranscriptError::OutOfRange { i, len: self.p1.len() });
        }
        let mut out = Vec::new();
        for idx in 1..i {
            out.push((Origin::P1, idx, self.p1[idx - 1]));
            if let Some(P0Symbol::Public(p)) = self.p0.get(idx - 1) {
                out.push((Origin::P0, idx, *p));
            }
        }
        Ok(out)
    }

    /// Everything the opposing prover may consult before emitting its
    /// `i`-th symbol: the membership prover's first `i` symbols merged with
    /// its own prior public emissions.
    pub fn project_for_p0(&self, i: usize) -> Result<VisibleHistory, TranscriptError> {
        if i == 0 || i > self.p0.len() + 1 {
            return Err(TranscriptError::OutOfRange { i, len: self.p0.len() });
        }
        let mut out = Vec::new();
        for idx in 1..=i.min(self.p1.len()) {
            if idx < i {
                if let Some(P0Symbol::Public(p)) = self.p0.get(idx - 1) {
                    // Own public emissions interleave after the matching
                    // opponent symbol.
                    out.push((Origin::P1, idx, self.p1[idx - 1]));
                    out.push((Origin::P0, idx, *p));
                    continue;
                }
            }
            out.push((Origin::P1, idx, self.p1[idx - 1]));
        }
        Ok(out)
    }

    /// Two-row dump of the interleaved streams for debugging, aligned like
    /// a claim diagram.
    pub fn render_rows(&self, spec: &MachineSpec) -> String {
        let cells: Vec<(String, String)> = self
            .p1
            .iter()
            .zip(self.p0.iter().map(Some).chain(std::iter::repeat(None)))
            .map(|(a, b)| {
                (a.render(spec), b.map(|s| s.render(spec)).unwrap_or_default())
            })
            .collect();
        let mut top = String::from("P1: ");
        let mut bot = String::from("P0: ");
        for (a, b) in &cells {
            let w = a.chars().count().max(b.chars().count()) + 1;
            top.push_str(a);
            for _ in a.chars().count()..w {
                top.push(' ');
            }
            bot.push_str(b);
            for _ in b.chars().count()..w {
                bot.push(' ');
            }
        }
        format!("{top}\n{bot}\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debate::alphabet::PrivateSymbol;

    fn zero() -> P0Symbol {
        P0Symbol::Private(PrivateSymbol::Zero)
    }

    #[test]
    fn zero_information_projection_shows_p1_only_its_own_symbols() {
        let mut t = Transcript::default();
        for _ in 0..3 {
            t.push_p1(PublicSymbol::Delim);
            t.push_p0(zero());
        }
        let h = t.project_for_p1(4).unwrap();
        assert_eq!(h.len(), 3);
        assert!(h.iter().all(|(o, _, _)| *o == Origin::P1));
        assert_eq!(t.project_for_p1(1).unwrap(), vec![]);
    }

    #[test]
    fn p0_sees_every_p1_symbol_up_to_its_index() {
        let mut t = Transcript::default();
        t.push_p1(PublicSymbol::Delim);
        t.push_p0(zero());
        t.push_p1(PublicSymbol::RoundSep);
        let h = t.project_for_p0(2).unwrap();
        assert_eq!(
            h,
            vec![
                (Origin::P1, 1, PublicSymbol::Delim),
                (Origin::P1, 2, PublicSymbol::RoundSep)
            ]
        );
        assert!(t.project_for_p0(9).is_err());
    }

    #[test]
    fn public_choice_symbols_become_visible_to_p1() {
        let mut t = Transcript::default();
        t.push_p1(PublicSymbol::Delim);
        t.push_p0(zero());
        t.push_p1(PublicSymbol::Delim);
        t.push_p0(P0Symbol::Public(PublicSymbol::Choice(1)));
        t.push_p1(PublicSymbol::Delim);
        t.push_p0(zero());
        let h = t.project_for_p1(4).unwrap();
        assert_eq!(
            h,
            vec![
                (Origin::P1, 1, PublicSymbol::Delim),
                (Origin::P1, 2, PublicSymbol::Delim),
                (Origin::P0, 2, PublicSymbol::Choice(1)),
                (Origin::P1, 3, PublicSymbol::Delim),
            ]
        );
    }
}
