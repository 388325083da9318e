use serde::{Deserialize, Serialize};

use super::ast::{Factor, OpKind, Rational, Sum};
use super::check::{check_homogeneous, SigVal};
use super::corpus::Corpus;
use super::parse::parse_sum;
use super::registry::Registry;
use super::{Sig, SigError};

/// A pair `(ψ₁, ψ₂)` coupled through a `∇₃ψ₁` line and a `∇₄ψ₂` line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BianchiPair {
    pub id: &'static str,
    /// 1: `∇₃ψ₁ ~ −k d*ψ₂`, `∇₄ψ₂ ~ d ψ₁`; 2: `∇₃ψ₁ ~ d ψ₂`, `∇₄ψ₂ ~ −k d*ψ₁`.
    pub kind: u8,
    pub k: u8,
    pub psi1: &'static [&'static str],
    pub psi2: &'static [&'static str],
    pub d3_line: &'static str,
    pub d4_line: &'static str,
}

const PAIRS: [BianchiPair; 8] = [
    BianchiPair {
        id: "alpha-betat",
        kind: 1,
        k: 2,
        psi1: &["alpha"],
        psi2: &["betat"],
        d3_line: "schem.bianchi.d3alpha",
        d4_line: "schem.bianchi.d4betat",
    },
    BianchiPair {
        id: "beta-Ksigmat",
        kind: 1,
        k: 1,
        psi1: &["beta"],
        psi2: &["K", "sigmat"],
        d3_line: "schem.bianchi.d3beta",
        d4_line: "schem.bianchi.d4K",
    },
    BianchiPair {
        id: "Ktsigmat-betab",
        kind: 2,
        k: 1,
        psi1: &["Kt", "-sigmat"],
        psi2: &["betab"],
        d3_line: "schem.bianchi.d3Kt",
        d4_line: "schem.bianchi.d4betab",
    },
    BianchiPair {
        id: "betab-alphab",
        kind: 2,
        k: 2,
        psi1: &["betab"],
        psi2: &["alphab"],
        d3_line: "bianchi.d3betab",
        d4_line: "bianchi.d4alphab",
    },
    BianchiPair {
        id: "betaF-rhoFsigmaF",
        kind: 1,
        k: 1,
        psi1: &["betaF"],
        psi2: &["rhoF", "sigmaF"],
        d3_line: "schem.maxwell.d3betaF",
        d4_line: "schem.maxwell.d4rhoF",
    },
    BianchiPair {
        id: "rhoFsigmaF-betabF",
        kind: 2,
        k: 1,
        psi1: &["rhoF", "-sigmaF"],
        psi2: &["betabF"],
        d3_line: "schem.maxwell.d3rhoF",
        d4_line: "schem.maxwell.d4betabF",
    },
    BianchiPair {
        id: "Psi4-Psisl",
        kind: 1,
        k: 1,
        psi1: &["Psi4", "0"],
        psi2: &["Psisl"],
        d3_line: "schem.wave.d3Psi4",
        d4_line: "schem.wave.d4Psisl",
    },
    BianchiPair {
        id: "Psisl-Psi3t",
        kind: 2,
        k: 1,
        psi1: &["Psisl"],
        psi2: &["Psi3t", "0"],
        d3_line: "wave.d3Psisl.renor",
        d4_line: "schem.wave.d4Psi3t",
    },
];

pub fn bianchi_pairs() -> &'static [BianchiPair] {
    &PAIRS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BianchiReport {
    pub id: String,
    pub kind: u8,
    pub k: u8,
    pub s2_psi1: Option<Sig>,
    pub s2_psi2: Option<Sig>,
    /// Coefficient of `trχ̲ψ₁` in the `∇₃ψ₁` line.
    pub coefficient: Option<Rational>,
    pub expected_coefficient: Option<Rational>,
    /// `(description, passed)` for each structural check.
    pub checks: Vec<(String, bool)>,
    pub pass: bool,
}

/// Common signature of the components, `None` when they disagree.
fn component_s2(items: &[&str], reg: &Registry) -> Result<Option<Sig>, SigError> {
    let mut out = None;
    for src in items {
        let s = parse_sum(src)?;
        if s.is_zero_literal() {
            continue;
        }
        let v = match super::check::signature_of(&s.terms[0], reg)? {
            SigVal::Exact(v) => v,
            SigVal::Floor(_) => return Ok(None),
        };
        match out {
            None => out = Some(v),
            Some(o) if o != v => return Ok(None),
            _ => {}
        }
    }
    Ok(out)
}

/// Whether a sum leads with `op(components...)`.
fn leads_with(s: &Sum, op: OpKind, comps: &[&str]) -> bool {
    let Some(t) = s.terms.first() else { return false };
    match t.factors.as_slice() {
        [Factor::Op { op: o, args }] if *o == op && !t.negative => {
            args.len() == comps.len() && args.iter().zip(comps).all(|(a, c)| a.to_string() == *c)
        }
        _ => false,
    }
}

/// Coefficient of the `trchib` term multiplying `ψ₁` on the left of the `∇₃` line.
fn trchib_coefficient(lhs: &Sum) -> Option<Rational> {
    lhs.terms.iter().skip(1).find(|t| t.has_symbol("trchib")).map(|t| t.coefficient())
}

pub fn check_bianchi_pair(id: &str, reg: &Registry, corpus: &Corpus) -> Result<BianchiReport, SigError> {
    let p = PAIRS.iter().find(|p| p.id == id).ok_or_else(|| SigError::UnknownPair(id.to_string()))?;
    let d3 = corpus.get(p.d3_line)?;
    let d4 = corpus.get(p.d4_line)?;
    let s1 = component_s2(p.psi1, reg)?;
    let s2 = component_s2(p.psi2, reg)?;
    let coefficient = trchib_coefficient(&d3.lhs);
    let expected = s1.map(|s| Rational::new(1 + i64::from(s.0), 2));

    let mut checks = Vec::new();
    checks.push(("psi1 components share one signature".to_string(), s1.is_some()));
    checks.push(("psi2 components share one signature".to_string(), s2.is_some()));
    checks
        .push(("s2(psi2) = s2(psi1) + 1/2".to_string(), matches!((s1, s2), (Some(a), Some(b)) if b == a + Sig::HALF)));
    checks.push((
        "trchib coefficient = 1/2 + s2(psi1)".to_string(),
        matches!((coefficient, expected), (Some(c), Some(e)) if c.same_value(&e)),
    ));
    checks.push((format!("{} leads with D3(psi1)", p.d3_line), leads_with(&d3.lhs, OpKind::D3, p.psi1)));
    checks.push((format!("{} leads with D4(psi2)", p.d4_line), leads_with(&d4.lhs, OpKind::D4, p.psi2)));
    checks.push((format!("{} homogeneous", p.d3_line), check_homogeneous(d3, reg)?.pass));
    checks.push((format!("{} homogeneous", p.d4_line), check_homogeneous(d4, reg)?.pass));
    let pass = checks.iter().all(|c| c.1);
    Ok(BianchiReport {
        id: p.id.to_string(),
        kind: p.kind,
        k: p.k,
        s2_psi1: s1,
        s2_psi2: s2,
        coefficient,
        expected_coefficient: expected,
        checks,
        pass,
    })
}
