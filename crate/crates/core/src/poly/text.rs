//! Text syntax for polynomials.
//!
//! Output is canonical: terms in descending graded-lex order, coefficients as
//! `p/q`, e.g. `-1/2*X1^2*X2 + X2 - 3`. Input accepts that form and, more
//! generally, sums, products, parentheses and nonnegative integer powers over
//! declared variables, with literals written as integers, `p/q`, or decimals.

use std::fmt;
use std::iter::Peekable;
use std::str::CharIndices;

use num_traits::{Num, Zero};
use thiserror::Error;

use super::{Ctx, Polynomial};
use crate::scalar::Coeff;

/// A syntax error at a 1-based character column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl<T: Coeff> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(abs.to_string());
            }
            for (v, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ctx.name(v).to_string()),
                    _ => factors.push(format!("{}^{e}", self.ctx.name(v))),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl<T: Coeff> Polynomial<T> {
    /// Parses `text` over the variables of `ctx`.
    pub fn parse(ctx: &Ctx, text: &str) -> Result<Self, ParseError> {
        let mut p = Parser {
            ctx,
            chars: text.char_indices().peekable(),
            text,
            col: 1,
        };
        p.skip_ws();
        if p.peek().is_none() {
            return Err(p.err("empty polynomial"));
        }
        let out = p.expr()?;
        p.skip_ws();
        match p.peek() {
            None => Ok(out),
            Some(c) => Err(p.err(format!("unexpected `{c}`"))),
        }
    }
}

struct Parser<'a> {
    ctx: &'a Ctx,
    chars: Peekable<CharIndices<'a>>,
    text: &'a str,
    col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next().map(|(_, c)| c);
        if c.is_some() {
            self.col += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.col,
            message: message.into(),
        }
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(false)
            }
            Some('-') | Some('−') => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn expr<T: Coeff>(&mut self) -> Result<Polynomial<T>, ParseError> {
        let neg = self.sign().unwrap_or(false);
        let first = self.term()?;
        let mut acc = if neg { -first } else { first };
        while let Some(neg) = self.sign() {
            let t = self.term()?;
            acc = if neg { acc - t } else { acc + t };
        }
        Ok(acc)
    }

    fn term<T: Coeff>(&mut self) -> Result<Polynomial<T>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.bump();
                let f = self.factor()?;
                acc = acc * f;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor<T: Coeff>(&mut self) -> Result<Polynomial<T>, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.bump();
        self.skip_ws();
        let col = self.col;
        let digits = self.take_while(|c| c.is_ascii_digit());
        let e: u32 = digits.parse().map_err(|_| ParseError {
            column: col,
            message: "expected a nonnegative integer exponent".into(),
        })?;
        Ok(base.pow(e))
    }

    fn atom<T: Coeff>(&mut self) -> Result<Polynomial<T>, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.skip_ws();
                if self.bump() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let c = self.number()?;
                Ok(Polynomial::constant(self.ctx, c))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let col = self.col;
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '\'');
                Polynomial::var_named(self.ctx, &name).map_err(|_| ParseError {
                    column: col,
                    message: format!("unknown variable `{name}`"),
                })
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number<T: Coeff>(&mut self) -> Result<T, ParseError> {
        let col = self.col;
        let mut numer = self.take_while(|c| c.is_ascii_digit());
        let mut denom = String::from("1");
        if self.peek() == Some('.') {
            self.bump();
            let frac = self.take_while(|c| c.is_ascii_digit());
            if frac.is_empty() {
                return Err(self.err("expected digits after `.`"));
            }
            numer.push_str(&frac);
            denom.push_str(&"0".repeat(frac.len()));
        }
        if self.peek() == Some('/') {
            self.bump();
            let d = self.take_while(|c| c.is_ascii_digit());
            if d.is_empty() {
                return Err(self.err("expected a denominator after `/`"));
            }
            denom = mul_decimal_strings(&denom, &d);
        }
        let literal = if denom == "1" {
            numer
        } else {
            format!("{numer}/{denom}")
        };
        let bad = || ParseError {
            column: col,
            message: format!("invalid coefficient `{literal}`"),
        };
        // ratio types only parse `p/q`; integer types only parse `p`
        let v = T::from_str_radix(&literal, 10)
            .or_else(|_| T::from_str_radix(&format!("{literal}/1"), 10))
            .map_err(|_| bad())?;
        if literal.contains('/') && is_zero_denominator(&literal) {
            return Err(bad());
        }
        Ok(v)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let start = self
            .chars
            .peek()
            .map(|&(i, _)| i)
            .unwrap_or(self.text.len());
        let mut end = start;
        while let Some(&(i, c)) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            end = i + c.len_utf8();
            self.bump();
        }
        self.text[start..end].to_string()
    }
}

fn is_zero_denominator(literal: &str) -> bool {
    literal
        .rsplit('/')
        .next()
        .is_some_and(|d| d.chars().all(|c| c == '0'))
}

/// Product of two nonnegative decimal strings, e.g. `"100" × "3" = "300"`.
fn mul_decimal_strings(a: &str, b: &str) -> String {
    let a = num_bigint::BigUint::from_str_radix(a, 10).unwrap_or_default();
    let b = num_bigint::BigUint::from_str_radix(b, 10).unwrap_or_default();
    let p = a * b;
    if p.is_zero() {
        "0".into()
    } else {
        p.to_string()
    }
}


#[cfg(test)]
mod props {
    use crate::poly::{Monomial, VariableContext};
    use crate::{Poly, Rational};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn display_parse_round_trip(terms in proptest::collection::vec(((0u32..4, 0u32..3), -9i64..10, 1i64..7), 0..6)) {
            let c = VariableContext::standard(2);
            let p = Poly::from_terms(&c, terms.into_iter().map(|((a, b), n, d)| {
                (Monomial::new(vec![a, b]), Rational::new(BigInt::from(n), BigInt::from(d)))
            }));
            let text = p.to_string();
            let back = Poly::parse(&c, &text).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
