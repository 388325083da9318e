//! Recursive-descent parser for the equation text format.
//!
//! ```text
//! line    := [ '[' label ']' ] sum '=' sum
//! sum     := [ '-' ] term { ('+' | '-') term }
//! term    := factor { '*' factor }
//! factor  := int [ '/' int ] | 'i' | ident [ '^' int ]
//!          | ('a' | 'b') [ '^' pow ] | '|u|' [ '^' pow ] | '|' sum '|' [ '^' int ]
//!          | op '(' sum { ',' sum } ')' | wrap '(' sum ')'
//!          | '(' sum { ',' sum } ')' [ '^{(' int ')}' ]
//! pow     := int | '(' [ '-' ] int [ '/' int ] ')'
//! ```

use super::ast::{Equation, Factor, OpKind, Rational, Sum, Term, WeightBase, Wrapper};
use super::SigError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Bar,
    Eq,
    Eof,
}

fn lex(src: &str, base: usize) -> Result<Vec<(Tok, usize)>, SigError> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < cs.len() {
        let c = cs[k];
        let col = base + k + 1;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let s = k;
            while k < cs.len() && (cs[k].is_ascii_alphanumeric() || cs[k] == '_') {
                k += 1;
            }
            out.push((Tok::Ident(cs[s..k].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() {
            let s = k;
            while k < cs.len() && cs[k].is_ascii_digit() {
                k += 1;
            }
            let txt: String = cs[s..k].iter().collect();
            let n = txt.parse().map_err(|_| SigError::Parse { col, msg: format!("integer {txt} out of range") })?;
            out.push((Tok::Int(n), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '|' => Tok::Bar,
            '=' => Tok::Eq,
            _ => return Err(SigError::Parse { col, msg: format!("unexpected character {c:?}") }),
        };
        out.push((t, col));
        k += 1;
    }
    out.push((Tok::Eof, base + cs.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SigError> {
        Err(SigError::Parse { col: self.col(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SigError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn int(&mut self) -> Result<i64, SigError> {
        match self.bump() {
            Tok::Int(n) => Ok(n),
            t => self.err(format!("expected integer, found {t:?}")),
        }
    }

    fn sum(&mut self) -> Result<Sum, SigError> {
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            let factors = self.term()?;
            terms.push(Term { negative, factors });
            negative = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
        }
        Ok(Sum { terms })
    }

    fn term(&mut self) -> Result<Vec<Factor>, SigError> {
        let mut fs = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            fs.push(self.factor()?);
        }
        Ok(fs)
    }

    fn int_pow(&mut self) -> Result<u32, SigError> {
        if *self.peek() != Tok::Caret {
            return Ok(1);
        }
        self.bump();
        let n = self.int()?;
        u32::try_from(n).ok().filter(|&n| n > 0).map_or_else(|| self.err("power must be positive"), Ok)
    }

    fn rational_pow(&mut self) -> Result<Rational, SigError> {
        if *self.peek() != Tok::Caret {
            return Ok(Rational::int(1));
        }
        self.bump();
        if *self.peek() != Tok::LParen {
            return Ok(Rational::int(self.int()?));
        }
        self.bump();
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let n = self.int()?;
        let d = if *self.peek() == Tok::Slash {
            self.bump();
            self.int()?
        } else {
            1
        };
        if d == 0 {
            return self.err("zero denominator");
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(Rational::new(if neg { -n } else { n }, d))
    }

    fn list(&mut self) -> Result<Vec<Sum>, SigError> {
        self.expect(Tok::LParen, "'('")?;
        let mut items = vec![self.sum()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.sum()?);
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(items)
    }

    fn factor(&mut self) -> Result<Factor, SigError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let d = self.int()?;
                    if d == 0 {
                        return self.err("zero denominator");
                    }
                    return Ok(Factor::Num(Rational::new(n, d)));
                }
                Ok(Factor::Num(Rational::int(n)))
            }
            Tok::Ident(name) => {
                self.bump();
                let call = *self.peek() == Tok::LParen;
                match name.as_str() {
                    "i" => Ok(Factor::Imag),
                    "a" => Ok(Factor::Weight { base: WeightBase::A, pow: self.rational_pow()? }),
                    "b" => Ok(Factor::Weight { base: WeightBase::B, pow: self.rational_pow()? }),
                    "u" => self.err("bare u is reserved; write |u|"),
                    _ if call && OpKind::from_name(&name).is_some() => {
                        let op = OpKind::from_name(&name).unwrap();
                        Ok(Factor::Op { op, args: self.list()? })
                    }
                    _ if call && Wrapper::from_name(&name).is_some() => {
                        let wrapper = Wrapper::from_name(&name).unwrap();
                        let mut items = self.list()?;
                        if items.len() != 1 {
                            return self.err(format!("{name} takes one argument"));
                        }
                        Ok(Factor::Wrap { wrapper, arg: items.remove(0) })
                    }
                    _ if call => self.err(format!("unknown operator {name}")),
                    _ => Ok(Factor::Sym { name, pow: self.int_pow()? }),
                }
            }
            Tok::LParen => {
                let items = self.list()?;
                let reg = if *self.peek() == Tok::Caret && *self.peek_at(1) == Tok::LBrace {
                    self.bump();
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let n = self.int()?;
                    self.expect(Tok::RParen, "')'")?;
                    self.expect(Tok::RBrace, "'}'")?;
                    Some(u32::try_from(n).map_err(|_| SigError::Parse { col: self.col(), msg: "bad order".into() })?)
                } else {
                    None
                };
                Ok(Factor::Group { items, reg })
            }
            Tok::Bar => {
                self.bump();
                if *self.peek() == Tok::Ident("u".into()) && *self.peek_at(1) == Tok::Bar {
                    self.bump();
                    self.bump();
                    return Ok(Factor::Weight { base: WeightBase::U, pow: self.rational_pow()? });
                }
                let arg = self.sum()?;
                self.expect(Tok::Bar, "'|'")?;
                Ok(Factor::Abs { arg, pow: self.int_pow()? })
            }
            t => self.err(format!("unexpected {t:?}")),
        }
    }
}

/// Parses a bare expression.
pub fn parse_sum(src: &str) -> Result<Sum, SigError> {
    let mut p = Parser { toks: lex(src, 0)?, pos: 0 };
    if *p.peek() == Tok::Eof {
        return Err(SigError::EmptyEquation(src.to_string()));
    }
    let s = p.sum()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("trailing input {:?}", p.peek()));
    }
    Ok(s)
}

/// Parses one equation line; a `#` starts a comment.
pub fn parse_equation(line: &str) -> Result<Equation, SigError> {
    let body = line.split('#').next().unwrap_or("");
    let trimmed = body.trim_start();
    let mut offset = body.len() - trimmed.len();
    let mut rest = trimmed;
    let mut label = None;
    if let Some(r) = rest.strip_prefix('[') {
        let end = r.find(']').ok_or(SigError::Parse { col: offset + 1, msg: "unterminated label".into() })?;
        let l = r[..end].trim();
        if l.is_empty() {
            return Err(SigError::Parse { col: offset + 2, msg: "empty label".into() });
        }
        label = Some(l.to_string());
        offset += end + 2;
        rest = &r[end + 1..];
    }
    let mut p = Parser { toks: lex(rest, offset)?, pos: 0 };
    let empty = || SigError::EmptyEquation(line.trim().to_string());
    if matches!(p.peek(), Tok::Eq | Tok::Eof) {
        return Err(empty());
    }
    let lhs = p.sum()?;
    p.expect(Tok::Eq, "'='")?;
    if *p.peek() == Tok::Eof {
        return Err(empty());
    }
    let rhs = p.sum()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("trailing input {:?}", p.peek()));
    }
    Ok(Equation { label, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(s: &str) {
        let e = parse_equation(s).unwrap();
        assert_eq!(e.to_string(), s);
    }

    #[test]
    fn canonical_round_trip() {
        rt("[x] D3(betaF) + 1/2*trchib*betaF = -2*e*Im(psi*conj(Psisl))");
        rt("D4(rhoF, sigmaF) = d1(betaF) + Gb*Gb + e*Gb*Gb");
        rt("D3(trchibt) + trchib*trchibt = |u|^2*a^(-2)*Gb*Gb");
        rt("D4(K, sigmat) = -d1(beta) - 1/2*trchib*|chih|^2 + b*a^(-1/2)*(Gb*Gb)^{(1)}");
        rt("D3(Psi4, 0) + 1/2*trchib*(Psi4, 0) = d1(Psisl)");
        rt("kappa = d1s(-omega, omegas) - 1/2*beta");
        rt("K = 3*(chih*rho + hodge(chih)*sigma) - rho^2");
    }

    #[test]
    fn structure() {
        let e = parse_equation("[lab] D3(x) + 1/2*y*x = -z").unwrap();
        assert_eq!(e.label.as_deref(), Some("lab"));
        assert_eq!(e.lhs.terms.len(), 2);
        assert!(e.rhs.terms[0].negative);
        assert!(e.lhs.terms[1].coefficient().same_value(&Rational::new(1, 2)));
        match &e.lhs.terms[0].factors[0] {
            Factor::Op { op, args } => {
                assert_eq!(*op, OpKind::D3);
                assert_eq!(args.len(), 1);
            }
            f => panic!("{f:?}"),
        }
    }

    #[test]
    fn weights_and_abs() {
        let s = parse_sum("|u|^(-1)*a*|x - y|^2").unwrap();
        let f = &s.terms[0].factors;
        assert_eq!(f[0], Factor::Weight { base: WeightBase::U, pow: Rational::int(-1) });
        assert_eq!(f[1], Factor::Weight { base: WeightBase::A, pow: Rational::int(1) });
        assert!(matches!(&f[2], Factor::Abs { pow: 2, .. }));
    }

    #[test]
    fn comments_are_stripped() {
        let e = parse_equation("x = y  # note").unwrap();
        assert_eq!(e.to_string(), "x = y");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_equation(" = x"), Err(SigError::EmptyEquation(_))));
        assert!(matches!(parse_equation("x = "), Err(SigError::EmptyEquation(_))));
        assert!(matches!(parse_equation(""), Err(SigError::EmptyEquation(_))));
        assert!(matches!(parse_equation("x = y = z"), Err(SigError::Parse { .. })));
        assert!(matches!(parse_equation("x = foo(y)"), Err(SigError::Parse { .. })));
        assert!(matches!(parse_equation("x = u*y"), Err(SigError::Parse { .. })));
        assert!(matches!(parse_equation("x = 1/0"), Err(SigError::Parse { .. })));
        assert!(matches!(parse_equation("[x = y"), Err(SigError::Parse { .. })));
        match parse_equation("x = y $ z") {
            Err(SigError::Parse { col, .. }) => assert_eq!(col, 7),
            r => panic!("{r:?}"),
        }
    }
}
