use std::fmt;

use serde::{Deserialize, Serialize};

/// Exact fraction kept as written (not reduced), so printing reproduces the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational { num, den }
    }

    pub fn int(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    /// Value equality (`1/2 == 2/4`).
    pub fn same_value(&self, o: &Rational) -> bool {
        i128::from(self.num) * i128::from(o.den) == i128::from(o.num) * i128::from(self.den)
    }

    pub fn mul(self, o: Rational) -> Rational {
        Rational::new(self.num * o.num, self.den * o.den)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn is_nonneg_int(&self) -> bool {
        self.den == 1 && self.num >= 0
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    D3,
    D4,
    Ds,
    Div,
    Curl,
    D1,
    D1s,
    D2,
    D2s,
    Dhot,
}

impl OpKind {
    pub const ALL: [OpKind; 10] = [
        OpKind::D3,
        OpKind::D4,
        OpKind::Ds,
        OpKind::Div,
        OpKind::Curl,
        OpKind::D1,
        OpKind::D1s,
        OpKind::D2,
        OpKind::D2s,
        OpKind::Dhot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::D3 => "D3",
            OpKind::D4 => "D4",
            OpKind::Ds => "Ds",
            OpKind::Div => "div",
            OpKind::Curl => "curl",
            OpKind::D1 => "d1",
            OpKind::D1s => "d1s",
            OpKind::D2 => "d2",
            OpKind::D2s => "d2s",
            OpKind::Dhot => "Dhot",
        }
    }

    pub fn from_name(s: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|o| o.name() == s)
    }

    /// Signature increment in half units: `e3` adds 1, `e4` adds 0, angular operators add ½.
    pub fn increment(self) -> i32 {
        match self {
            OpKind::D3 => 2,
            OpKind::D4 => 0,
            _ => 1,
        }
    }
}

/// Operators with no effect on the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wrapper {
    Re,
    Im,
    Conj,
    Hodge,
}

impl Wrapper {
    pub fn name(self) -> &'static str {
        match self {
            Wrapper::Re => "Re",
            Wrapper::Im => "Im",
            Wrapper::Conj => "conj",
            Wrapper::Hodge => "hodge",
        }
    }

    pub fn from_name(s: &str) -> Option<Wrapper> {
        [Wrapper::Re, Wrapper::Im, Wrapper::Conj, Wrapper::Hodge].into_iter().find(|w| w.name() == s)
    }
}

/// Scale weights that carry no signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightBase {
    /// `|u|`
    U,
    /// `a`
    A,
    /// `b`
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Factor {
    Num(Rational),
    Imag,
    Sym {
        name: String,
        pow: u32,
    },
    Weight {
        base: WeightBase,
        pow: Rational,
    },
    Op {
        op: OpKind,
        args: Vec<Sum>,
    },
    Wrap {
        wrapper: Wrapper,
        arg: Sum,
    },
    /// `( ... )`; more than one item is a tuple, `reg` marks `^{(n)}`.
    Group {
        items: Vec<Sum>,
        reg: Option<u32>,
    },
    Abs {
        arg: Sum,
        pow: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub negative: bool,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sum {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    pub label: Option<String>,
    pub lhs: Sum,
    pub rhs: Sum,
}

impl Term {
    /// Product of the numeric coefficients, with the sign.
    pub fn coefficient(&self) -> Rational {
        let mut c = Rational::int(if self.negative { -1 } else { 1 });
        for f in &self.factors {
            if let Factor::Num(r) = f {
                c = c.mul(*r);
            }
        }
        c
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.factors.iter().any(|f| matches!(f, Factor::Sym { name: n, pow: 1 } if n == name))
    }

    /// A term consisting only of the literal `0`.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self.factors.as_slice(), [Factor::Num(r)] if r.num == 0)
    }
}

impl Sum {
    pub fn is_zero_literal(&self) -> bool {
        matches!(self.terms.as_slice(), [t] if t.is_zero_literal())
    }
}

fn write_pow(f: &mut fmt::Formatter<'_>, p: Rational) -> fmt::Result {
    if p.is_nonneg_int() {
        if p.num != 1 {
            write!(f, "^{}", p.num)?;
        }
        Ok(())
    } else {
        write!(f, "^({p})")
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Sum]) -> fmt::Result {
    for (k, s) in items.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Num(r) => write!(f, "{r}"),
            Factor::Imag => f.write_str("i"),
            Factor::Sym { name, pow } => {
                f.write_str(name)?;
                write_pow(f, Rational::int(i64::from(*pow)))
            }
            Factor::Weight { base, pow } => {
                f.write_str(match base {
                    WeightBase::U => "|u|",
                    WeightBase::A => "a",
                    WeightBase::B => "b",
                })?;
                write_pow(f, *pow)
            }
            Factor::Op { op, args } => {
                write!(f, "{}(", op.name())?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Factor::Wrap { wrapper, arg } => write!(f, "{}({arg})", wrapper.name()),
            Factor::Group { items, reg } => {
                f.write_str("(")?;
                write_list(f, items)?;
                f.write_str(")")?;
                if let Some(n) = reg {
                    write!(f, "^{{({n})}}")?;
                }
                Ok(())
            }
            Factor::Abs { arg, pow } => {
                write!(f, "|{arg}|")?;
                write_pow(f, Rational::int(i64::from(*pow)))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Sum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            match (k, t.negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "[{l}] ")?;
        }
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}
