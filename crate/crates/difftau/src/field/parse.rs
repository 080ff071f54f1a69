//! Parser for rational-function expressions in the variable `z`, e.g.
//! `"(z+2)/(z+1)"`, `"3z^2 - 1/2"`, `"(z-4)/(z-6)"`.

use super::poly::Poly;
use super::ratfn::RatFn;
use super::scalar::{parse_rational, Field, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => {}
            'z' | 'Z' => out.push(Tok::Z),
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '.') {
                    i += 1;
                }
                out.push(Tok::Num(chars[start..=i].iter().collect()));
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unexpected character '{other}' in expression"
                )))
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, F> {
    toks: &'a [Tok],
    pos: usize,
    _f: std::marker::PhantomData<F>,
}

impl<F: Scalar> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFn<F>> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFn<F>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(Error::InvalidInput("division by zero in expression".into()));
                    }
                    acc = acc / d;
                }
                // implicit multiplication: "2z", "3(z+1)", "(z+1)(z+2)"
                Some(Tok::Z) | Some(Tok::LParen) | Some(Tok::Num(_)) => {
                    acc = acc * self.power()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFn<F>> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn<F>> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let e = match self.bump() {
                Some(Tok::Num(n)) => n
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad exponent '{n}'")))?,
                _ => return Err(Error::InvalidInput("exponent must be a non-negative integer".into())),
            };
            return Ok((0..e).fold(RatFn::one(), |acc, _| acc * base.clone()));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<RatFn<F>> {
        match self.bump() {
            Some(Tok::Num(n)) => {
                let q = parse_rational(&n)
                    .ok_or_else(|| Error::InvalidInput(format!("bad number '{n}'")))?;
                Ok(RatFn::constant(F::from_q(&q)))
            }
            Some(Tok::Z) => Ok(RatFn::from_poly(Poly::z())),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::InvalidInput("missing ')'".into())),
                }
            }
            t => Err(Error::InvalidInput(format!("unexpected token {t:?}"))),
        }
    }
}

/// Parses a rational function of `z` with rational coefficients.
pub fn parse_ratfn<F: Scalar>(s: &str) -> Result<RatFn<F>> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::InvalidInput("empty expression".into()));
    }
    let mut p = Parser::<F> {
        toks: &toks,
        pos: 0,
        _f: std::marker::PhantomData,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::InvalidInput(format!("trailing input in '{s}'")));
    }
    Ok(e)
}

/// Parses a scalar given as "p/q", an integer or a decimal.
pub fn parse_value<F: Scalar>(s: &str) -> Result<F> {
    F::parse_scalar(s).ok_or_else(|| Error::InvalidInput(format!("bad number '{s}'")))
}
