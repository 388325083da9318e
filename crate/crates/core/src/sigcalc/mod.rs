//! Signature bookkeeping for null-frame equations.
//!
//! Every quantity carries a half-integer weight `s2`; every additive term of a
//! valid equation carries the same total weight. This module parses a small
//! textual form of such equations, evaluates term weights against a symbol
//! registry and reports mismatches.

mod ast;
mod bianchi;
mod check;
mod corpus;
mod parse;
mod registry;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{Equation, Factor, OpKind, Rational, Sum, Term, WeightBase, Wrapper};
pub use bianchi::{bianchi_pairs, check_bianchi_pair, BianchiPair, BianchiReport};
pub use check::{check_homogeneous, signature_of, HomogeneityReport, Offender, Side, SigVal};
pub use corpus::{
    mutation_suite, tension_report, Corpus, CorpusLine, LintEntry, LintReport, MutationOutcome, Tension, TensionReport,
};
pub use parse::{parse_equation, parse_sum};
pub use registry::{expected_bounds, FrameIndices, IndexClass, Registry, SymbolInfo, SymbolKind, TableGroup, RESERVED};

/// A signature value stored in half units, so `Sig(1)` is `0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct Sig(pub i32);

impl Sig {
    pub const ZERO: Sig = Sig(0);
    pub const HALF: Sig = Sig(1);

    pub fn from_f64(x: f64) -> Option<Sig> {
        let h = 2.0 * x;
        (h.fract() == 0.0 && h.abs() < 1e6).then(|| Sig(h as i32))
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn as_rational(self) -> Rational {
        Rational::new(i64::from(self.0), 2)
    }
}

impl std::ops::Add for Sig {
    type Output = Sig;
    fn add(self, o: Sig) -> Sig {
        Sig(self.0 + o.0)
    }
}

impl std::ops::Sub for Sig {
    type Output = Sig;
    fn sub(self, o: Sig) -> Sig {
        Sig(self.0 - o.0)
    }
}

impl std::ops::Mul<i32> for Sig {
    type Output = Sig;
    fn mul(self, k: i32) -> Sig {
        Sig(self.0 * k)
    }
}

impl From<Sig> for f64 {
    fn from(s: Sig) -> f64 {
        s.as_f64()
    }
}

impl TryFrom<f64> for Sig {
    type Error = String;
    fn try_from(x: f64) -> Result<Sig, String> {
        Sig::from_f64(x).ok_or_else(|| format!("{x} is not a half-integer"))
    }
}

impl fmt::Display for Sig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}", self.as_f64())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("empty equation: {0}")]
    EmptyEquation(String),
    #[error("unknown Bianchi pair: {0}")]
    UnknownPair(String),
    #[error("missing corpus line: {0}")]
    MissingLine(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_display_and_conversion() {
        assert_eq!(Sig(3).to_string(), "1.5");
        assert_eq!(Sig(-1).to_string(), "-0.5");
        assert_eq!(Sig(4).to_string(), "2");
        assert_eq!(Sig::from_f64(0.5), Some(Sig::HALF));
        assert_eq!(Sig::from_f64(0.3), None);
        assert_eq!(serde_json::to_string(&Sig(3)).unwrap(), "1.5");
        assert_eq!(serde_json::from_str::<Sig>("-0.5").unwrap(), Sig(-1));
    }
}
