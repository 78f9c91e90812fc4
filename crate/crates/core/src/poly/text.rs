//! Canonical text form of polynomials: `2.9*x1^2 + 1*x1*x2 + 1*x2^2`.
//!
//! Coefficients are written as integers, terminating decimals or `p/q`
//! rationals; variables are `x1 … xn`. The parser additionally accepts
//! omitted unit coefficients (`x1 - x2^2`), scientific notation and
//! parenthesised sub-expressions with integer powers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Coeff, Monomial, Polynomial, RatPoly, Rational};
use crate::{Error, Result};

pub(super) fn format_polynomial<T: Coeff>(p: &Polynomial<T>) -> String {
    let mut terms: Vec<(&Monomial, &T)> = p.terms().collect();
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&c.format_abs());
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => out.push_str(&format!("*x{}", i + 1)),
                _ => out.push_str(&format!("*x{}^{}", i + 1, e)),
            }
        }
    }
    out
}

pub(super) fn format_f64(x: f64) -> String {
    if x.is_finite() && x == libm_trunc(x) && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{:?}", x)
    }
}

fn libm_trunc(x: f64) -> f64 {
    num_traits::Float::trunc(x)
}

/// Integer, terminating decimal, or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    let den = q.denom();
    if den.is_one() {
        return q.numer().to_string();
    }
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let mut rest = den.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", q.numer(), den);
    }
    let k = twos.max(fives);
    let scaled = q.numer() * num_traits::pow(BigInt::from(10u8), k as usize) / den;
    let digits = scaled.abs().to_string();
    let k = k as usize;
    let padded = if digits.len() <= k {
        let mut s = String::from("0");
        s.push_str(&"0".repeat(k - digits.len()));
        s.push_str(&digits);
        s
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - k);
    let sign = if scaled.is_negative() { "-" } else { "" };
    format!("{}{}.{}", sign, int_part, frac_part)
}

/// Parses a decimal (`-0.25`, `1e-3`) or `p/q` literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num = parse_rational(a)?;
        let den = parse_rational(b)?;
        if den.is_zero() {
            return Err(Error::Parse { column: 1, message: "division by zero".to_string() });
        }
        return Ok(num / den);
    }
    let mut p = Parser { chars: s.chars().collect(), pos: 0, nvars: 0 };
    let negative = p.eat('-');
    if !negative {
        p.eat('+');
    }
    let v = p.number()?;
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected trailing characters in number"));
    }
    Ok(if negative { -v } else { v })
}

/// Parses the polynomial grammar in `nvars` variables.
pub fn parse_polynomial(s: &str, nvars: usize) -> Result<RatPoly> {
    let mut p = Parser { chars: s.chars().collect(), pos: 0, nvars };
    p.skip_ws();
    if p.pos == p.chars.len() {
        return Err(p.error("empty polynomial"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(out)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn error(&self, message: &str) -> Error {
        Error::Parse { column: self.pos + 1, message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatPoly> {
        self.skip_ws();
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            self.skip_ws();
            if self.eat('+') {
                let t = self.term()?;
                acc = &acc + &t;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = &acc - &t;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatPoly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                let f = self.factor()?;
                acc = &acc * &f;
            } else if self.eat('/') {
                self.skip_ws();
                let start = self.pos;
                let d = self.number()?;
                if d.is_zero() {
                    self.pos = start;
                    return Err(self.error("division by zero"));
                }
                acc = acc.scale(&(Rational::one() / d));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<RatPoly> {
        self.skip_ws();
        let base = match self.peek() {
            Some('x') => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.digits();
                if digits.is_empty() {
                    self.pos = start;
                    return Err(self.error("expected variable index after 'x'"));
                }
                let idx: usize = digits.parse().map_err(|_| self.error("bad variable index"))?;
                if idx == 0 || idx > self.nvars {
                    self.pos = start;
                    return Err(self.error(&format!(
                        "variable x{} out of range for dimension {}",
                        idx, self.nvars
                    )));
                }
                RatPoly::var(self.nvars, idx - 1)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                inner
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let v = self.number()?;
                RatPoly::constant(self.nvars, v)
            }
            _ => return Err(self.error("expected number, variable or '('")),
        };
        self.skip_ws();
        if self.eat('^') {
            self.skip_ws();
            let digits = self.digits();
            let k: u32 = digits.parse().map_err(|_| self.error("expected integer exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<Rational> {
        let int_part = self.digits();
        let mut frac_part = String::new();
        if self.eat('.') {
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(self.error("expected number"));
        }
        let mut exponent: i64 = 0;
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = self.eat('-');
            if !neg {
                self.eat('+');
            }
            let d = self.digits();
            if d.is_empty() {
                self.pos = save;
                return Err(self.error("malformed exponent"));
            }
            exponent = d.parse().map_err(|_| self.error("exponent too large"))?;
            if neg {
                exponent = -exponent;
            }
        }
        let mut mantissa = int_part;
        mantissa.push_str(&frac_part);
        let m: BigInt = mantissa.parse().map_err(|_| self.error("bad number"))?;
        let shift = exponent - frac_part.len() as i64;
        let ten = BigInt::from(10u8);
        let value = if shift >= 0 {
            Rational::from_integer(m * num_traits::pow(ten, shift as usize))
        } else {
            Rational::new(m, num_traits::pow(ten, (-shift) as usize))
        };
        Ok(value)
    }
}
