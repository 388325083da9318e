use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Sig, SigError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableGroup {
    Geometry,
    Matter,
    Renormalized,
}

/// Offset applied by the index-counting rule for each family of quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexClass {
    /// Curvature and connection coefficients: `½N_A + N_3 − 1`.
    Geometric,
    /// Electromagnetic components and potentials: `½N_A + N_3 − ½`.
    Maxwell,
    /// Scalar field and its derivatives: `½N_A + N_3`.
    Scalar,
    /// Ricci, Schouten and current components: `½N_A + N_3`.
    Source,
}

impl IndexClass {
    fn offset(self) -> i32 {
        match self {
            IndexClass::Geometric => -2,
            IndexClass::Maxwell => -1,
            IndexClass::Scalar | IndexClass::Source => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameIndices {
    pub n_a: u32,
    pub n_3: u32,
    pub class: IndexClass,
}

impl FrameIndices {
    pub fn rule_value(&self) -> Sig {
        Sig(self.n_a as i32 + 2 * self.n_3 as i32 + self.class.offset())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SymbolKind {
    /// An entry of the signature tables; these are the mutable entries.
    Table(TableGroup),
    /// A derived symbol with a fixed signature (sources, currents).
    Fixed,
    /// Shares the signature of its target (traces, renormalized variants, duals).
    Alias(String),
    /// A schematic class; its signature is the minimum over its members.
    Family(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Entry {
    kind: SymbolKind,
    s2: Sig,
    printed: Option<Sig>,
    indices: Option<FrameIndices>,
}

/// Resolved view of one symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolInfo {
    pub name: String,
    pub kind: SymbolKind,
    pub s2: Sig,
    /// Table value as printed, when it differs from the registered one.
    pub printed: Option<Sig>,
    pub indices: Option<FrameIndices>,
    pub expected_a_power: Option<f64>,
    pub expected_u_power: Option<f64>,
}

/// Symbol table mapping names to signatures.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    entries: BTreeMap<String, Entry>,
}

const fn h(x: i32) -> Sig {
    Sig(x)
}

use IndexClass::{Geometric as G, Maxwell as M, Scalar as P, Source as S};

#[rustfmt::skip]
const TABLE: &[(&str, TableGroup, Sig, Option<(u32, u32, IndexClass)>)] = &[
    ("alpha", TableGroup::Geometry, h(0), Some((2, 0, G))),
    ("beta", TableGroup::Geometry, h(1), Some((1, 1, G))),
    ("rho", TableGroup::Geometry, h(2), Some((0, 2, G))),
    ("sigma", TableGroup::Geometry, h(2), Some((0, 2, G))),
    ("betab", TableGroup::Geometry, h(3), Some((1, 2, G))),
    ("alphab", TableGroup::Geometry, h(4), Some((2, 2, G))),
    ("chi", TableGroup::Geometry, h(0), Some((2, 0, G))),
    ("omega", TableGroup::Geometry, h(0), Some((0, 1, G))),
    ("Omega", TableGroup::Geometry, h(0), None),
    ("zeta", TableGroup::Geometry, h(1), Some((1, 1, G))),
    ("eta", TableGroup::Geometry, h(1), Some((1, 1, G))),
    ("etab", TableGroup::Geometry, h(1), Some((1, 1, G))),
    ("chib", TableGroup::Geometry, h(2), Some((2, 1, G))),
    ("omegab", TableGroup::Geometry, h(2), Some((0, 2, G))),
    ("gsl", TableGroup::Geometry, h(0), Some((2, 0, G))),
    ("betaF", TableGroup::Matter, h(0), Some((1, 0, M))),
    ("rhoF", TableGroup::Matter, h(1), Some((0, 1, M))),
    ("sigmaF", TableGroup::Matter, h(1), Some((2, 0, M))),
    ("betabF", TableGroup::Matter, h(2), Some((1, 1, M))),
    ("psi", TableGroup::Matter, h(0), Some((0, 0, P))),
    ("Psi4", TableGroup::Matter, h(0), Some((0, 0, P))),
    ("Psisl", TableGroup::Matter, h(1), Some((1, 0, P))),
    ("Psi3", TableGroup::Matter, h(2), Some((0, 1, P))),
    ("U", TableGroup::Matter, h(-1), Some((0, 0, M))),
    ("Ub", TableGroup::Matter, h(1), Some((0, 1, M))),
    ("Asl", TableGroup::Matter, h(0), Some((1, 0, M))),
    ("e", TableGroup::Matter, h(1), None),
    ("mu", TableGroup::Renormalized, h(2), None),
    ("mub", TableGroup::Renormalized, h(2), None),
    ("kappa", TableGroup::Renormalized, h(1), None),
    ("kappab", TableGroup::Renormalized, h(3), None),
    ("K", TableGroup::Renormalized, h(2), None),
    ("sigmat", TableGroup::Renormalized, h(2), None),
];

/// Table values printed differently from the values the equations require.
const PRINTED: &[(&str, Sig)] = &[("Ub", h(0)), ("Asl", h(1))];

#[rustfmt::skip]
const FIXED: &[(&str, Sig, Option<(u32, u32, IndexClass)>)] = &[
    ("S44", h(0), Some((0, 0, S))), ("Ric44", h(0), Some((0, 0, S))),
    ("S4", h(1), Some((1, 0, S))), ("Ric4", h(1), Some((1, 0, S))),
    ("S34", h(2), Some((0, 1, S))), ("Ric34", h(2), Some((0, 1, S))),
    ("Ssl", h(2), Some((2, 0, S))), ("RicAB", h(2), Some((2, 0, S))), ("Sslh", h(2), Some((2, 0, S))),
    ("trSsl", h(2), None), ("TrS", h(2), None), ("R", h(2), None),
    ("S3", h(3), Some((1, 1, S))), ("Ric3", h(3), Some((1, 1, S))),
    ("S33", h(4), Some((0, 2, S))), ("Ric33", h(4), Some((0, 2, S))),
    ("J434", h(2), Some((0, 1, S))), ("J434s", h(2), None),
    ("J4b4", h(1), Some((1, 0, S))),
    ("J3b4", h(3), Some((1, 1, S))), ("J4b3", h(3), Some((1, 1, S))),
    ("JAB4", h(2), Some((2, 0, S))), ("JBA4", h(2), Some((2, 0, S))), ("J4hat", h(2), Some((2, 0, S))),
    ("J343", h(4), Some((0, 2, S))), ("J343s", h(4), None),
    ("JAB3", h(4), Some((2, 1, S))), ("JBA3", h(4), Some((2, 1, S))), ("J3hat", h(4), Some((2, 1, S))),
    ("J3b3", h(5), Some((1, 2, S))),
];

const ALIASES: &[(&str, &str)] = &[
    ("chih", "chi"),
    ("trchi", "chi"),
    ("trchit", "chi"),
    ("chibh", "chib"),
    ("trchib", "chib"),
    ("trchibt", "chib"),
    ("logOmega", "Omega"),
    ("omegas", "omega"),
    ("omegabs", "omegab"),
    ("betat", "beta"),
    ("betabt", "betab"),
    ("Kt", "K"),
    ("Kc", "K"),
    ("muc", "mu"),
    ("Psi3t", "Psi3"),
];

const GG: &[&str] = &["trchi", "trchit", "trchibt", "eta", "etab", "zeta", "omega", "omegas", "omegab", "omegabs"];
const GB: &[&str] =
    &["chih", "chibh", "betaF", "psi", "Psi4", "Psi3", "Asl", "rhoF", "sigmaF", "betabF", "Psisl", "Psi3t", "Ub"];

/// Names with a fixed meaning in the grammar.
pub const RESERVED: &[&str] = &["a", "b", "e", "i", "u"];

/// Tabulated sup-norm exponents `(a-power, |u|-power)`.
const BOUNDS: &[(&str, f64, f64)] = &[
    ("psi", 0.5, -1.0),
    ("Psi4", 0.5, -1.0),
    ("betaF", 0.5, -1.0),
    ("Asl", 0.5, -1.0),
    ("chih", 0.5, -1.0),
    ("alpha", 0.5, -1.0),
    ("rhoF", 1.0, -2.0),
    ("sigmaF", 1.0, -2.0),
    ("Psisl", 1.0, -2.0),
    ("Ub", 1.0, -2.0),
    ("betabF", 1.5, -3.0),
    ("Psi3t", 1.5, -3.0),
    ("betab", 1.5, -4.0),
    ("alphab", 2.0, -5.0),
    ("rho", 1.0, -3.0),
    ("sigma", 1.0, -3.0),
    ("beta", 0.5, -2.0),
    ("omega", 0.0, -1.0),
    ("trchi", 0.0, -1.0),
    ("logOmega", 0.0, -1.0),
    ("trchibt", 1.0, -3.0),
    ("omegab", 1.0, -3.0),
    ("eta", 0.5, -2.0),
    ("etab", 0.5, -2.0),
    ("zeta", 0.5, -2.0),
    ("chibh", 0.5, -2.0),
    ("Psi3", 0.5, -2.0),
];

fn indices(t: Option<(u32, u32, IndexClass)>) -> Option<FrameIndices> {
    t.map(|(n_a, n_3, class)| FrameIndices { n_a, n_3, class })
}

impl Registry {
    /// The registry encoding the signature tables.
    pub fn standard() -> Registry {
        let mut entries = BTreeMap::new();
        for &(name, group, s2, idx) in TABLE {
            let printed = PRINTED.iter().find(|p| p.0 == name).map(|p| p.1);
            entries
                .insert(name.to_string(), Entry { kind: SymbolKind::Table(group), s2, printed, indices: indices(idx) });
        }
        for &(name, s2, idx) in FIXED {
            entries
                .insert(name.to_string(), Entry { kind: SymbolKind::Fixed, s2, printed: None, indices: indices(idx) });
        }
        for &(name, target) in ALIASES {
            let kind = SymbolKind::Alias(target.to_string());
            entries.insert(name.to_string(), Entry { kind, s2: Sig::ZERO, printed: None, indices: None });
        }
        for (name, members) in [("Gg", GG), ("Gb", GB)] {
            let kind = SymbolKind::Family(members.iter().map(|s| s.to_string()).collect());
            entries.insert(name.to_string(), Entry { kind, s2: Sig::ZERO, printed: None, indices: None });
        }
        Registry { entries }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn is_family(&self, name: &str) -> bool {
        matches!(self.entries.get(name), Some(Entry { kind: SymbolKind::Family(_), .. }))
    }

    /// Resolved signature; aliases follow their target, families take the minimum member.
    pub fn s2(&self, name: &str) -> Result<Sig, SigError> {
        self.resolve(name, 0)
    }

    fn resolve(&self, name: &str, depth: usize) -> Result<Sig, SigError> {
        let e = self.entries.get(name).ok_or_else(|| SigError::UnknownSymbol(name.to_string()))?;
        if depth > 8 {
            return Err(SigError::UnknownSymbol(format!("{name} (cyclic definition)")));
        }
        match &e.kind {
            SymbolKind::Table(_) | SymbolKind::Fixed => Ok(e.s2),
            SymbolKind::Alias(t) => self.resolve(t, depth + 1),
            SymbolKind::Family(ms) => {
                let mut lo: Option<Sig> = None;
                for m in ms {
                    let s = self.resolve(m, depth + 1)?;
                    lo = Some(lo.map_or(s, |l| l.min(s)));
                }
                lo.ok_or_else(|| SigError::UnknownSymbol(format!("{name} (empty family)")))
            }
        }
    }

    /// The mutable table entries in table order.
    pub fn table_entries(&self) -> Vec<(String, TableGroup)> {
        TABLE.iter().filter_map(|(n, g, ..)| self.entries.contains_key(*n).then(|| (n.to_string(), *g))).collect()
    }

    /// Copy with one table or fixed entry replaced.
    pub fn with_s2(&self, name: &str, s2: Sig) -> Result<Registry, SigError> {
        let mut r = self.clone();
        let e = r.entries.get_mut(name).ok_or_else(|| SigError::UnknownSymbol(name.to_string()))?;
        match e.kind {
            SymbolKind::Table(_) | SymbolKind::Fixed => {
                e.s2 = s2;
                Ok(r)
            }
            _ => Err(SigError::UnknownSymbol(format!("{name} is not a table entry"))),
        }
    }

    /// Copy using the printed table values wherever they disagree.
    pub fn with_printed_values(&self) -> Registry {
        let mut r = self.clone();
        for e in r.entries.values_mut() {
            if let Some(p) = e.printed {
                e.s2 = p;
            }
        }
        r
    }

    /// `(name, registered, printed)` for each entry with a differing printed value.
    pub fn printed_deviations(&self) -> Vec<(String, Sig, Sig)> {
        self.entries.iter().filter_map(|(n, e)| e.printed.map(|p| (n.clone(), e.s2, p))).collect()
    }

    /// Value of the index-counting rule, when frame indices are declared.
    pub fn rule_value(&self, name: &str) -> Option<Sig> {
        self.entries.get(name)?.indices.map(|i| i.rule_value())
    }

    pub fn info(&self, name: &str) -> Result<SymbolInfo, SigError> {
        let s2 = self.s2(name)?;
        let e = &self.entries[name];
        let bound = BOUNDS.iter().find(|b| b.0 == name);
        Ok(SymbolInfo {
            name: name.to_string(),
            kind: e.kind.clone(),
            s2,
            printed: e.printed,
            indices: e.indices,
            expected_a_power: bound.map(|b| b.1),
            expected_u_power: bound.map(|b| b.2),
        })
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::standard()
    }
}

/// Expected `(a-power, |u|-power)` of the sup-norm bound: the tabulated value when
/// present, else `(s2, −(2 s2 + 1))`.
pub fn expected_bounds(reg: &Registry, symbol: &str) -> Result<(f64, f64), SigError> {
    let info = reg.info(symbol)?;
    match (info.expected_a_power, info.expected_u_power) {
        (Some(a), Some(u)) => Ok((a, u)),
        _ => {
            let s = info.s2.as_f64();
            Ok((s, -(2.0 * s + 1.0)))
        }
    }
}
