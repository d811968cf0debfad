//! Text form of ladder polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | number 'i' | 'i' | 'pi' | 'a' | 'ad'
//!         | '(' expr ')' | func '(' expr ')'
//! func   := sqrt | exp | cos | sin | cosh | sinh
//! ```
//!
//! Function arguments must be constants. The `Display` output of a
//! [`Polynomial`] parses back to the identical polynomial.

use super::Polynomial;
use crate::error::{Error, Result};
use crate::fock::C64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| err(start, format!("bad number `{text}`")))?;
                let imaginary = i < bytes.len()
                    && bytes[i] == b'i'
                    && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
                if imaginary {
                    i += 1;
                    out.push((start, Tok::Imag(value)));
                } else {
                    out.push((start, Tok::Num(value)));
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => return Err(err(i, format!("unexpected character `{}`", ch as char))),
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(err(self.offset(), format!("expected {tok:?}, found {:?}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            let at = self.offset();
            self.bump();
            let rhs = self.unary()?;
            acc = acc.multiply(&rhs).map_err(|e| err(at, e.to_string()))?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.scale(C64::new(-1.0, 0.0)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Tok::Num(n) if n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64 => {
                base.pow(n as u32).map_err(|e| err(at, e.to_string()))
            }
            other => Err(err(at, format!("exponent must be a non-negative integer, found {other:?}"))),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(x) => Ok(Polynomial::scalar(C64::new(x, 0.0))),
            Tok::Imag(x) => Ok(Polynomial::scalar(C64::new(0.0, x))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "a" => Ok(Polynomial::a()),
                "ad" => Ok(Polynomial::adag()),
                "i" => Ok(Polynomial::scalar(C64::new(0.0, 1.0))),
                "pi" => Ok(Polynomial::scalar(C64::new(std::f64::consts::PI, 0.0))),
                "sqrt" | "exp" | "cos" | "sin" | "cosh" | "sinh" => {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let z = arg
                        .as_scalar()
                        .ok_or_else(|| err(at, format!("argument of `{name}` must be a constant")))?;
                    let v = match name.as_str() {
                        "sqrt" => z.sqrt(),
                        "exp" => z.exp(),
                        "cos" => z.cos(),
                        "sin" => z.sin(),
                        "cosh" => z.cosh(),
                        _ => z.sinh(),
                    };
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(err(at, format!("`{name}` produced a non-finite value")));
                    }
                    Ok(Polynomial::scalar(v))
                }
                other => Err(err(at, format!("unknown identifier `{other}`"))),
            },
            other => Err(err(at, format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_polynomial(src: &str) -> Result<Polynomial> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(err(0, "empty expression"));
    }
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(err(p.offset(), format!("trailing input {:?}", p.peek())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Ladder, NormalForm};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parses_linear_combination() {
        let p = parse_polynomial("1.5431*a + 1.1752*ad").unwrap();
        assert_eq!(p, Polynomial::linear(c(1.5431, 0.0), c(1.1752, 0.0)));
    }

    #[test]
    fn parses_functions_and_complex_literals() {
        let p = parse_polynomial("cosh(1)*a + sinh(1)*ad").unwrap();
        assert_eq!(p, Polynomial::linear(c(1f64.cosh(), 0.0), c(1f64.sinh(), 0.0)));
        let q = parse_polynomial("(2-0.5i)*ad*a + 3i").unwrap();
        let terms: Vec<_> = q.terms().map(|(w, v)| (w.clone(), *v)).collect();
        assert_eq!(terms, vec![(vec![], c(0.0, 3.0)), (vec![Ladder::Adag, Ladder::A], c(2.0, -0.5))]);
        let e = parse_polynomial("exp(-i*0.3)*a + exp(i*0.3)*ad").unwrap();
        assert_eq!(e, Polynomial::quadrature(0.3));
    }

    #[test]
    fn power_and_precedence() {
        let p = parse_polynomial("(a + ad)^2 - 2*ad*a").unwrap();
        let nf = p.normal_order();
        assert_eq!(nf, NormalForm::from_terms([((2, 0), c(1.0, 0.0)), ((0, 2), c(1.0, 0.0)), ((0, 0), c(1.0, 0.0))]));
        assert_eq!(parse_polynomial("-a^2").unwrap(), Polynomial::a().pow(2).unwrap().scale(c(-1.0, 0.0)));
        assert_eq!(parse_polynomial("2e-3i").unwrap(), Polynomial::scalar(c(0.0, 2e-3)));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "a +", "b", "a^-1", "a^1.5", "sqrt(a)", "(a", "a)", "a $ ad", "a^17", "exp(1000)"] {
            assert!(parse_polynomial(bad).is_err(), "{bad}");
        }
        match parse_polynomial("a + b") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trip() {
        let p = parse_polynomial("(1.25-3i)*a*ad*a + 0.1*ad + (-2+1e-9i) + a^3").unwrap();
        let text = p.to_string();
        assert_eq!(parse_polynomial(&text).unwrap(), p);
        assert_eq!(parse_polynomial(&text).unwrap().to_string(), text);
    }
}
