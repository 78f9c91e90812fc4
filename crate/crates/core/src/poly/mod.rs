//! Sparse multivariate polynomials over exact rationals or floats, and the
//! symmetric-tensor view of homogeneous polynomials.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded (total degree first) and, within a degree, lexicographic with `x1`
//! largest. Coefficient layouts derived from that order are therefore stable
//! across runs.

mod monomial;
mod tensor;
mod text;

pub use monomial::Monomial;
pub use tensor::{coefficient_row, multinomial, multisets, permanent, vertex_tuple_values, SymmetricTensor};
pub use text::{format_rational, parse_polynomial, parse_rational};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational coefficients.
pub type Rational = num_rational::BigRational;

/// Coefficient ring of a [`Polynomial`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_u64(n: u64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_negative(&self) -> bool;
    /// Text form of the absolute value, in the polynomial exchange grammar.
    fn format_abs(&self) -> alloc::string::String;
}

impl Coeff for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn format_abs(&self) -> alloc::string::String {
        text::format_f64(num_traits::Float::abs(*self))
    }
}

impl Coeff for Rational {
    fn from_u64(n: u64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn format_abs(&self) -> alloc::string::String {
        format_rational(&Signed::abs(self))
    }
}

/// Exact rational with the same value as `x` (every finite double is dyadic).
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Sparse polynomial in `nvars` variables `x1 … xn`.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

pub type RatPoly = Polynomial<Rational>;
pub type FloatPoly = Polynomial<f64>;

impl<T: Coeff> Polynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, summing
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: m.nvars() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// `Some(d)` when every term has degree `d`. The zero polynomial reports 0.
    pub fn is_homogeneous(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => Some(0),
            Some(d) => degrees.all(|e| e == d).then_some(d),
        }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, T::one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `∂p/∂x_{i+1}`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(i) {
                out.add_term(dm, c.clone() * T::from_u64(e as u64));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms.iter().map(|(m, c)| c.to_f64() * m.eval(x)).sum()
    }

    pub fn to_f64(&self) -> FloatPoly {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.to_f64()))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
        }
    }

    /// Substitutes `x_i = Σ_j forms[i][j]·λ_j`, returning a polynomial in the
    /// `λ` variables.
    pub fn compose_linear(&self, forms: &[Vec<f64>]) -> FloatPoly {
        assert_eq!(forms.len(), self.nvars, "one linear form per variable");
        let k = forms.first().map_or(0, Vec::len);
        let max_exp: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.exponents()[i]).max().unwrap_or(0))
            .collect();
        // powers[i][e] = (Σ_j forms[i][j] λ_j)^e
        let powers: Vec<Vec<FloatPoly>> = (0..self.nvars)
            .map(|i| {
                let form = FloatPoly::from_terms(
                    k,
                    forms[i].iter().enumerate().map(|(j, &c)| (Monomial::var(k, j), c)),
                )
                .expect("dimension-consistent form");
                let mut acc = vec![FloatPoly::constant(k, 1.0)];
                for e in 1..=max_exp[i] as usize {
                    let next = &acc[e - 1] * &form;
                    acc.push(next);
                }
                acc
            })
            .collect();
        let mut out = FloatPoly::zero(k);
        for (m, c) in &self.terms {
            let mut prod = FloatPoly::constant(k, c.to_f64());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                }
            }
            for (mm, cc) in prod.terms {
                out.add_term(mm, cc);
            }
        }
        out
    }

    /// Largest absolute coefficient (as a float); 0 for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| num_traits::Float::abs(c.to_f64())).fold(0.0, f64::max)
    }
}

impl RatPoly {
    /// `‖x‖₂² = Σ x_i²` with exact coefficients.
    pub fn norm_squared(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.add_term(Monomial::new(e), Rational::one());
        }
        p
    }

    pub fn from_f64_poly(p: &FloatPoly) -> Self {
        Polynomial {
            nvars: p.nvars,
            terms: p.terms.iter().map(|(m, c)| (m.clone(), rational_from_f64(*c))).collect(),
        }
    }
}

/// `Σ_i a_i·b_i` for equally sized polynomial vectors.
pub fn dot<T: Coeff>(a: &[Polynomial<T>], b: &[Polynomial<T>]) -> Polynomial<T> {
    assert_eq!(a.len(), b.len());
    let n = a.first().or(b.first()).map_or(0, Polynomial::nvars);
    let mut out = Polynomial::zero(n);
    for (p, q) in a.iter().zip(b) {
        for (m, c) in (p * q).terms {
            out.add_term(m, c);
        }
    }
    out
}

impl<T: Coeff> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        self.try_add(rhs).expect("polynomial dimensions must match")
    }
}

impl<T: Coeff> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        self.try_sub(rhs).expect("polynomial dimensions must match")
    }
}

impl<T: Coeff> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        self.try_mul(rhs).expect("polynomial dimensions must match")
    }
}

impl<T: Coeff> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.scale(&-T::one())
    }
}

impl<T: Coeff> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_polynomial(self))
    }
}

impl<T: Coeff> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(s: &str, n: usize) -> RatPoly {
        parse_polynomial(s, n).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p("x1 + x2", 2);
        let b = p("x1 - x2", 2);
        assert_eq!(&a * &b, p("x1^2 - x2^2", 2));
    }

    #[test]
    fn additive_identity() {
        let a = p("2.9*x1^2 + x1*x2 + x2^2", 2);
        assert_eq!(&a + &RatPoly::zero(2), a);
    }

    #[test]
    fn product_matches_term_expansion() {
        // brute force: multiply exponent vectors term by term
        let a = p("x1*x2", 2);
        let prod = &a * &a;
        let expected = RatPoly::monomial(Monomial::new(vec![2, 2]), Rational::one());
        assert_eq!(prod, expected);
        assert_eq!(prod.num_terms(), 1);
    }

    #[test]
    fn cancellation_prunes_zero_terms() {
        let a = p("x1 + x2", 2);
        let diff = &a - &a;
        assert!(diff.is_zero());
        assert_eq!(diff.to_string(), "0");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = p("x1", 1);
        let b = p("x1", 2);
        assert!(matches!(a.try_add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn gradient_examples() {
        let g = p("x1^2*x2", 2).gradient();
        assert_eq!(g[0], p("2*x1*x2", 2));
        assert_eq!(g[1], p("x1^2", 2));
        let c = p("5", 2).gradient();
        assert!(c.iter().all(Polynomial::is_zero));
    }

    #[test]
    fn homogeneity() {
        assert_eq!(p("x1^2 + x1*x2", 2).is_homogeneous(), Some(2));
        assert_eq!(p("x1^2 + x1", 2).is_homogeneous(), None);
        assert_eq!(RatPoly::zero(3).is_homogeneous(), Some(0));
    }

    #[test]
    fn compose_linear_matches_pointwise_evaluation() {
        let h = p("2.9*x1^2 + x1*x2 + x2^2", 2);
        let forms = vec![vec![0.8, 0.2], vec![0.2, 0.8]];
        let q = h.compose_linear(&forms);
        for &(a, b) in &[(0.3, 0.7), (1.0, 0.0), (0.5, 0.5)] {
            let x = [0.8 * a + 0.2 * b, 0.2 * a + 0.8 * b];
            assert!((q.eval(&[a, b]) - h.eval(&x)).abs() < 1e-12);
        }
    }
}
