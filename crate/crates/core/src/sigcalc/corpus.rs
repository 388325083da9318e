use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::Equation;
use super::bianchi::{bianchi_pairs, check_bianchi_pair, BianchiReport};
use super::check::{check_homogeneous, signature_of, HomogeneityReport, SigVal};
use super::parse::parse_equation;
use super::registry::Registry;
use super::{Sig, SigError};

const FIXTURES: [(&str, &str); 5] = [
    ("null.eq", include_str!("../../fixtures/sigcalc/null.eq")),
    ("bianchi.eq", include_str!("../../fixtures/sigcalc/bianchi.eq")),
    ("maxwell.eq", include_str!("../../fixtures/sigcalc/maxwell.eq")),
    ("wave.eq", include_str!("../../fixtures/sigcalc/wave.eq")),
    ("schematic.eq", include_str!("../../fixtures/sigcalc/schematic.eq")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusLine {
    pub file: String,
    pub line: usize,
    /// The line as written, comment removed.
    pub source: String,
    pub equation: Equation,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub lines: Vec<CorpusLine>,
}

impl Corpus {
    /// The embedded equation fixtures.
    pub fn standard() -> Corpus {
        let mut c = Corpus::default();
        for (name, text) in FIXTURES {
            c.lines.extend(Corpus::parse_text(name, text).expect("embedded fixture parses").lines);
        }
        c
    }

    /// Raw text of the embedded fixtures as `(file name, contents)`.
    pub fn fixture_texts() -> &'static [(&'static str, &'static str)] {
        &FIXTURES
    }

    /// Parses one equation per non-blank, non-comment line.
    pub fn parse_text(file: &str, text: &str) -> Result<Corpus, SigError> {
        let mut lines = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim_end();
            if body.trim().is_empty() {
                continue;
            }
            let equation = parse_equation(body).map_err(|e| match e {
                SigError::Parse { col, msg } => SigError::Parse { col, msg: format!("{file}:{}: {msg}", k + 1) },
                SigError::EmptyEquation(s) => SigError::EmptyEquation(format!("{file}:{}: {s}", k + 1)),
                other => other,
            })?;
            lines.push(CorpusLine { file: file.to_string(), line: k + 1, source: body.trim().to_string(), equation });
        }
        Ok(Corpus { lines })
    }

    pub fn get(&self, label: &str) -> Result<&Equation, SigError> {
        self.lines
            .iter()
            .find(|l| l.equation.label.as_deref() == Some(label))
            .map(|l| &l.equation)
            .ok_or_else(|| SigError::MissingLine(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.get(label).is_ok()
    }

    /// Homogeneity of every line, plus every Bianchi pair whose lines are present.
    pub fn lint(&self, reg: &Registry) -> Result<LintReport, SigError> {
        let mut entries = Vec::with_capacity(self.lines.len());
        for l in &self.lines {
            entries.push(LintEntry {
                file: l.file.clone(),
                line: l.line,
                report: check_homogeneous(&l.equation, reg)?,
            });
        }
        let mut pairs = Vec::new();
        for p in bianchi_pairs() {
            if self.contains(p.d3_line) && self.contains(p.d4_line) {
                pairs.push(check_bianchi_pair(p.id, reg, self)?);
            }
        }
        Ok(LintReport::new(entries, pairs))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintEntry {
    pub file: String,
    pub line: usize,
    #[serde(flatten)]
    pub report: HomogeneityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintReport {
    pub equations: Vec<LintEntry>,
    pub pairs: Vec<BianchiReport>,
    pub passed: usize,
    pub failed: usize,
}

impl LintReport {
    fn new(equations: Vec<LintEntry>, pairs: Vec<BianchiReport>) -> LintReport {
        let passed = equations.iter().filter(|e| e.report.pass).count() + pairs.iter().filter(|p| p.pass).count();
        let failed = equations.len() + pairs.len() - passed;
        LintReport { equations, pairs, passed, failed }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    /// Labels (or `file:line`) of failing equations and pair ids of failing pairs.
    pub fn failures(&self) -> Vec<String> {
        let eqs = self
            .equations
            .iter()
            .filter(|e| !e.report.pass)
            .map(|e| e.report.label.clone().unwrap_or_else(|| format!("{}:{}", e.file, e.line)));
        let pairs = self.pairs.iter().filter(|p| !p.pass).map(|p| format!("pair {}", p.id));
        eqs.chain(pairs).collect()
    }
}

impl fmt::Display for LintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<6} {:<28} {:>6}  location", "status", "label", "s2")?;
        for e in &self.equations {
            let r = &e.report;
            let common = r.common.map_or("-".to_string(), |c| c.to_string());
            writeln!(
                f,
                "{:<6} {:<28} {:>6}  {}:{}",
                if r.pass { "PASS" } else { "FAIL" },
                r.label.as_deref().unwrap_or("-"),
                common,
                e.file,
                e.line
            )?;
            for o in &r.offenders {
                writeln!(
                    f,
                    "         term `{}`: expected {}, got {} (deficit {})",
                    o.term, o.expected, o.got, o.deficit
                )?;
            }
            for i in &r.issues {
                writeln!(f, "         {i}")?;
            }
        }
        for p in &self.pairs {
            writeln!(f, "{:<6} pair {}", if p.pass { "PASS" } else { "FAIL" }, p.id)?;
            for (what, _) in p.checks.iter().filter(|c| !c.1) {
                writeln!(f, "         failed: {what}")?;
            }
        }
        write!(f, "{} passed, {} failed", self.passed, self.failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationOutcome {
    pub symbol: String,
    pub original: Sig,
    pub mutated: Sig,
    pub failures: Vec<String>,
}

impl MutationOutcome {
    pub fn detected(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Shifts each table entry by ±½ in turn and lints the corpus under each change.
pub fn mutation_suite(reg: &Registry, corpus: &Corpus) -> Result<Vec<MutationOutcome>, SigError> {
    let mut out = Vec::new();
    for (name, _) in reg.table_entries() {
        let original = reg.s2(&name)?;
        for d in [Sig::HALF, Sig(-1)] {
            let mutated = original + d;
            let m = reg.with_s2(&name, mutated)?;
            let failures = corpus.lint(&m)?.failures();
            out.push(MutationOutcome { symbol: name.clone(), original, mutated, failures });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tension {
    pub symbol: String,
    /// Value as printed in the table.
    pub table: Sig,
    /// Value implied by the index rule or by the defining equation.
    pub implied: Option<Sig>,
    /// Value used by the registry.
    pub used: Sig,
    pub source: String,
    pub consistent: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensionReport {
    pub entries: Vec<Tension>,
    /// Corpus lines that fail when the printed values are used instead.
    pub printed_value_failures: Vec<String>,
}

impl TensionReport {
    pub fn flagged(&self) -> Vec<&Tension> {
        self.entries.iter().filter(|t| !t.consistent).collect()
    }
}

/// Table-versus-rule comparison for entries with a differing printed value, and
/// table-versus-definition comparison for the renormalized `kappa`, `kappab`.
pub fn tension_report(reg: &Registry, corpus: &Corpus) -> Result<TensionReport, SigError> {
    let mut entries = Vec::new();
    for (name, used, printed) in reg.printed_deviations() {
        let implied = reg.rule_value(&name);
        entries.push(Tension {
            symbol: name.clone(),
            table: printed,
            implied,
            used,
            source: "index rule".into(),
            consistent: implied == Some(printed),
            note: format!("printed {printed}, index rule gives {}, registry uses {used}", opt(implied)),
        });
    }
    for (name, label) in [("kappa", "renor.kappa"), ("kappab", "renor.kappab")] {
        let table = reg.s2(name)?;
        let eq = corpus.get(label)?;
        let lead = eq.rhs.terms.first().ok_or_else(|| SigError::EmptyEquation(label.into()))?;
        let implied = match signature_of(lead, reg)? {
            SigVal::Exact(s) => Some(s),
            SigVal::Floor(_) => None,
        };
        let homogeneous = check_homogeneous(eq, reg)?.pass;
        let consistent = implied == Some(table) && homogeneous;
        let note = if consistent {
            format!("no tension: table {table}, definition {}", opt(implied))
        } else {
            format!("table {table}, definition gives {} (homogeneous: {homogeneous})", opt(implied))
        };
        entries.push(Tension {
            symbol: name.into(),
            table,
            implied,
            used: table,
            source: format!("definition {label}"),
            consistent,
            note,
        });
    }
    let printed_value_failures = corpus.lint(&reg.with_printed_values())?.failures();
    Ok(TensionReport { entries, printed_value_failures })
}

fn opt(s: Option<Sig>) -> String {
    s.map_or("-".into(), |s| s.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_every_fixture_line() {
        let c = Corpus::standard();
        assert!(c.lines.len() > 120);
        for l in &c.lines {
            assert_eq!(l.equation.to_string(), l.source, "{}:{}", l.file, l.line);
        }
    }

    #[test]
    fn labels_are_unique() {
        let c = Corpus::standard();
        let mut seen = std::collections::HashSet::new();
        for l in &c.lines {
            let lab = l.equation.label.clone().expect("every fixture line is labelled");
            assert!(seen.insert(lab.clone()), "duplicate {lab}");
        }
    }

    #[test]
    fn standard_corpus_passes() {
        let r = Corpus::standard().lint(&Registry::standard()).unwrap();
        assert!(r.all_pass(), "{r}");
        assert_eq!(r.pairs.len(), 8);
    }

    #[test]
    fn maxwell_examples() {
        let reg = Registry::standard();
        let c = Corpus::standard();
        let r = check_homogeneous(c.get("maxwell.d3betaF").unwrap(), &reg).unwrap();
        assert!(r.pass);
        assert_eq!(r.common, Some(Sig(2)));
        let r = check_homogeneous(c.get("maxwell.d4rhoF").unwrap(), &reg).unwrap();
        assert!(r.pass);
        assert_eq!(r.common, Some(Sig(1)));
    }

    #[test]
    fn charge_mutation_hits_maxwell_charge_terms() {
        let reg = Registry::standard().with_s2("e", Sig::ZERO).unwrap();
        let c = Corpus::standard();
        for label in ["maxwell.d3betaF", "maxwell.d4rhoF"] {
            let r = check_homogeneous(c.get(label).unwrap(), &reg).unwrap();
            assert!(!r.pass);
            assert_eq!(r.offenders.len(), 1, "{label}");
            assert!(r.offenders[0].term.contains("e*Im"));
            assert_eq!(r.offenders[0].deficit, 0.5);
        }
    }

    #[test]
    fn every_single_mutation_is_detected() {
        let out = mutation_suite(&Registry::standard(), &Corpus::standard()).unwrap();
        assert_eq!(out.len(), 66);
        for m in &out {
            assert!(m.detected(), "{} -> {} undetected", m.symbol, m.mutated);
        }
    }

    #[test]
    fn tensions() {
        let reg = Registry::standard();
        let t = tension_report(&reg, &Corpus::standard()).unwrap();
        let flagged: Vec<&str> = t.flagged().iter().map(|t| t.symbol.as_str()).collect();
        assert_eq!(flagged, vec!["Asl", "Ub"]);
        let k: Vec<_> = t.entries.iter().filter(|e| e.symbol.starts_with("kappa")).collect();
        assert_eq!(k.len(), 2);
        assert!(k.iter().all(|e| e.consistent && e.note.starts_with("no tension")));
        assert!(t.printed_value_failures.iter().any(|f| f == "wave.Psi3"));
        assert!(t.printed_value_failures.iter().any(|f| f == "potential.betaF"));
    }

    #[test]
    fn parse_text_reports_line() {
        let e = Corpus::parse_text("x.eq", "# c\n\nx = $\n").unwrap_err();
        match e {
            SigError::Parse { msg, .. } => assert!(msg.starts_with("x.eq:3:")),
            other => panic!("{other:?}"),
        }
    }
}
