use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Equation, Factor, Sum, Term};
use super::registry::Registry;
use super::{Sig, SigError};

/// Signature of a term. Schematic factors only give a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "s2")]
pub enum SigVal {
    Exact(Sig),
    /// At least this value (schematic class or regularity-marked group).
    Floor(Sig),
}

impl SigVal {
    pub fn value(self) -> Sig {
        match self {
            SigVal::Exact(s) | SigVal::Floor(s) => s,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, SigVal::Exact(_))
    }

    fn add(self, o: SigVal) -> SigVal {
        let v = self.value() + o.value();
        if self.is_exact() && o.is_exact() {
            SigVal::Exact(v)
        } else {
            SigVal::Floor(v)
        }
    }

    fn shift(self, d: i32) -> SigVal {
        match self {
            SigVal::Exact(s) => SigVal::Exact(Sig(s.0 + d)),
            SigVal::Floor(s) => SigVal::Floor(Sig(s.0 + d)),
        }
    }

    fn floor(self) -> SigVal {
        SigVal::Floor(self.value())
    }

    /// Whether a term with this value fits an equation of common signature `c`.
    pub fn admits(self, c: Sig) -> bool {
        match self {
            SigVal::Exact(s) => s == c,
            SigVal::Floor(s) => s <= c,
        }
    }
}

impl fmt::Display for SigVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigVal::Exact(s) => write!(f, "{s}"),
            SigVal::Floor(s) => write!(f, ">={s}"),
        }
    }
}

struct Eval<'a> {
    reg: &'a Registry,
    issues: Vec<String>,
}

impl Eval<'_> {
    fn term(&mut self, t: &Term) -> Result<SigVal, SigError> {
        let mut acc = SigVal::Exact(Sig::ZERO);
        for f in &t.factors {
            acc = acc.add(self.factor(f)?);
        }
        Ok(acc)
    }

    /// Common value of a sum; `None` for a literal zero.
    fn sum(&mut self, s: &Sum) -> Result<Option<SigVal>, SigError> {
        let mut vals = Vec::new();
        for t in s.terms.iter().filter(|t| !t.is_zero_literal()) {
            vals.push((t, self.term(t)?));
        }
        let exact = vals.iter().find(|(_, v)| v.is_exact()).map(|(_, v)| v.value());
        let Some(c) = exact else {
            return Ok(vals.iter().map(|(_, v)| v.value()).min().map(SigVal::Floor));
        };
        for (t, v) in &vals {
            if !v.admits(c) {
                self.issues.push(format!("inner sum: `{t}` has s2 {v}, expected {c} (in `{s}`)"));
            }
        }
        Ok(Some(SigVal::Exact(c)))
    }

    /// Common value of a list of components (tuple or operator arguments).
    fn list(&mut self, items: &[Sum]) -> Result<SigVal, SigError> {
        let mut out: Option<SigVal> = None;
        for it in items {
            let Some(v) = self.sum(it)? else { continue };
            out = Some(match out {
                None => v,
                Some(o) if o.is_exact() => {
                    if !v.admits(o.value()) {
                        self.issues.push(format!("component `{it}` has s2 {v}, expected {o}"));
                    }
                    o
                }
                Some(o) if v.is_exact() => {
                    if !o.admits(v.value()) {
                        self.issues.push(format!("components before `{it}` have s2 {o}, expected {v}"));
                    }
                    v
                }
                Some(o) => SigVal::Floor(o.value().min(v.value())),
            });
        }
        Ok(out.unwrap_or(SigVal::Exact(Sig::ZERO)))
    }

    fn factor(&mut self, f: &Factor) -> Result<SigVal, SigError> {
        Ok(match f {
            Factor::Num(_) | Factor::Imag | Factor::Weight { .. } => SigVal::Exact(Sig::ZERO),
            Factor::Sym { name, pow } => {
                let s = self.reg.s2(name)? * (*pow as i32);
                if self.reg.is_family(name) {
                    SigVal::Floor(s)
                } else {
                    SigVal::Exact(s)
                }
            }
            Factor::Op { op, args } => self.list(args)?.shift(op.increment()),
            Factor::Wrap { arg, .. } => self.sum(arg)?.unwrap_or(SigVal::Exact(Sig::ZERO)),
            Factor::Group { items, reg } => {
                let v = self.list(items)?;
                if reg.is_some() {
                    v.floor()
                } else {
                    v
                }
            }
            Factor::Abs { arg, pow } => match self.sum(arg)?.unwrap_or(SigVal::Exact(Sig::ZERO)) {
                SigVal::Exact(s) => SigVal::Exact(s * (*pow as i32)),
                SigVal::Floor(s) => SigVal::Floor(s * (*pow as i32)),
            },
        })
    }
}

/// Signature of one additive term.
pub fn signature_of(t: &Term, reg: &Registry) -> Result<SigVal, SigError> {
    Eval { reg, issues: Vec::new() }.term(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub side: Side,
    pub index: usize,
    pub term: String,
    pub expected: Sig,
    pub got: SigVal,
    /// `expected − got`.
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub label: Option<String>,
    pub equation: String,
    pub common: Option<Sig>,
    pub pass: bool,
    pub offenders: Vec<Offender>,
    /// Mismatches inside groups, operator arguments or absolute values.
    pub issues: Vec<String>,
}

/// Checks that every term shares the signature of the leading left-hand term.
pub fn check_homogeneous(eq: &Equation, reg: &Registry) -> Result<HomogeneityReport, SigError> {
    if eq.lhs.terms.is_empty() || eq.rhs.terms.is_empty() {
        return Err(SigError::EmptyEquation(eq.to_string()));
    }
    let mut ev = Eval { reg, issues: Vec::new() };
    let mut terms = Vec::new();
    for (side, sum) in [(Side::Lhs, &eq.lhs), (Side::Rhs, &eq.rhs)] {
        for (k, t) in sum.terms.iter().enumerate() {
            if !t.is_zero_literal() {
                terms.push((side, k, t, ev.term(t)?));
            }
        }
    }
    let common = terms.iter().find(|x| x.3.is_exact()).map(|x| x.3.value());
    let mut offenders = Vec::new();
    if let Some(c) = common {
        for &(side, index, t, got) in &terms {
            if !got.admits(c) {
                offenders.push(Offender {
                    side,
                    index,
                    term: t.to_string(),
                    expected: c,
                    got,
                    deficit: (c - got.value()).as_f64(),
                });
            }
        }
    }
    let issues = ev.issues;
    Ok(HomogeneityReport {
        label: eq.label.clone(),
        equation: eq.to_string(),
        common,
        pass: offenders.is_empty() && issues.is_empty(),
        offenders,
        issues,
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse::{parse_equation, parse_sum};
    use super::*;

    fn sig(src: &str) -> SigVal {
        let s = parse_sum(src).unwrap();
        signature_of(&s.terms[0], &Registry::standard()).unwrap()
    }

    #[test]
    fn term_signatures() {
        assert_eq!(sig("D3(betaF)"), SigVal::Exact(Sig(2)));
        assert_eq!(sig("e*Im(psi*conj(Psisl))"), SigVal::Exact(Sig(2)));
        assert_eq!(sig("trchib*betaF"), SigVal::Exact(Sig(2)));
        assert_eq!(sig("D4(rhoF)"), SigVal::Exact(Sig(1)));
        assert_eq!(sig("Ds(Ds(psi))"), SigVal::Exact(Sig(2)));
        assert_eq!(sig("|u|^(-2)*a*rho^2"), SigVal::Exact(Sig(4)));
        assert_eq!(sig("|eta - etab|^2"), SigVal::Exact(Sig(2)));
        assert_eq!(sig("e*Gb*Gb"), SigVal::Floor(Sig(1)));
        assert_eq!(sig("(Psi4*Psi4)^{(1)}"), SigVal::Floor(Sig(0)));
        assert_eq!(sig("D3(Psi4, 0)"), SigVal::Exact(Sig(2)));
    }

    #[test]
    fn unknown_symbol() {
        let s = parse_sum("D3(nosuch)").unwrap();
        assert_eq!(signature_of(&s.terms[0], &Registry::standard()), Err(SigError::UnknownSymbol("nosuch".into())));
    }

    #[test]
    fn homogeneous_pass_and_fail() {
        let reg = Registry::standard();
        let e = parse_equation("D4(rhoF) + trchi*rhoF = div(betaF) + 2*e*Im(psi*conj(Psi4))").unwrap();
        let r = check_homogeneous(&e, &reg).unwrap();
        assert!(r.pass);
        assert_eq!(r.common, Some(Sig(1)));

        let e = parse_equation("D3(betaF) = rhoF + beta + D4(rho) + Psi3^2").unwrap();
        let r = check_homogeneous(&e, &reg).unwrap();
        assert!(!r.pass);
        let d: Vec<f64> = r.offenders.iter().map(|o| o.deficit).collect();
        assert_eq!(d, vec![0.5, 0.5, -1.0]);
        assert!(r.offenders.iter().all(|o| o.side == Side::Rhs));
    }

    #[test]
    fn floors_pass_when_not_above_common() {
        let reg = Registry::standard();
        let e = parse_equation("D4(omegab) = -1/2*K + |u|*a^(-1)*Gb*Gb").unwrap();
        assert!(check_homogeneous(&e, &reg).unwrap().pass);
        let e = parse_equation("D4(omega) = Gb*Psi3").unwrap();
        assert!(!check_homogeneous(&e, &reg).unwrap().pass);
    }

    #[test]
    fn inner_mismatch_is_reported() {
        let reg = Registry::standard();
        let e = parse_equation("rho = (eta + rho)*eta").unwrap();
        let r = check_homogeneous(&e, &reg).unwrap();
        assert!(!r.pass);
        assert_eq!(r.issues.len(), 1);
    }

    #[test]
    fn empty_side_is_an_error() {
        let e = Equation { label: None, lhs: Sum { terms: vec![] }, rhs: parse_sum("x").unwrap() };
        assert!(matches!(check_homogeneous(&e, &Registry::standard()), Err(SigError::EmptyEquation(_))));
    }
}
