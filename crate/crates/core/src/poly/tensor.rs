use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Coeff, FloatPoly, Monomial, Polynomial};
use crate::{Error, Result};

/// Number of distinct orderings of the index multiset with multiplicities
/// `exponents`, i.e. `d! / Π e_i!`.
pub fn multinomial(exponents: &[u32]) -> u128 {
    let mut out: u128 = 1;
    let mut seen: u128 = 0;
    for &e in exponents {
        for k in 1..=e as u128 {
            seen += 1;
            // running product of binomials keeps every intermediate integral
            out = out * seen / k;
        }
    }
    out
}

/// Permanent of a square matrix by Ryser's inclusion–exclusion formula.
pub fn permanent<T: Coeff>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut total = T::zero();
    for mask in 1u64..(1u64 << n) {
        let mut prod = T::one();
        for row in m {
            let mut s = T::zero();
            for (j, v) in row.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    s = s + v.clone();
                }
            }
            prod = prod * s;
        }
        if (n - mask.count_ones() as usize) % 2 == 1 {
            total = total - prod;
        } else {
            total = total + prod;
        }
    }
    total
}

fn factorial<T: Coeff>(k: u32) -> T {
    (1..=k as u64).fold(T::one(), |acc, i| acc * T::from_u64(i))
}

/// `Σ` over the distinct orderings `σ` of the multiset `t` of
/// `Π_k points[k][σ(k)]`, which is `perm(X) / Π mult!` with `X[k][l] = points[k][t_l]`.
fn distinct_permutation_sum<T: Coeff>(t: &[usize], exponents: &[u32], points: &[Vec<T>]) -> T {
    let x: Vec<Vec<T>> = points.iter().map(|p| t.iter().map(|&i| p[i].clone()).collect()).collect();
    let denom = exponents.iter().fold(T::one(), |acc, &e| acc * factorial::<T>(e));
    permanent(&x) / denom
}

/// Order-`d` symmetric tensor over `ℝⁿ`, stored by sorted index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensor<T> {
    order: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, T>,
}

impl<T: Coeff> SymmetricTensor<T> {
    /// Symmetrises a homogeneous polynomial: the entry of a sorted tuple is the
    /// monomial's coefficient divided by its multinomial count.
    pub fn from_polynomial(p: &Polynomial<T>) -> Result<Self> {
        let d = p.is_homogeneous().ok_or(Error::NotHomogeneous)?;
        if d == 0 {
            return Err(Error::Invalid("tensor order must be at least 1".into()));
        }
        Ok(Self::from_polynomial_of_order(p, d as usize))
    }

    /// Like [`from_polynomial`](Self::from_polynomial) with the order given
    /// explicitly, so the zero polynomial maps to the zero tensor of that order.
    /// Terms of other degrees are ignored.
    pub fn from_polynomial_of_order(p: &Polynomial<T>, order: usize) -> Self {
        let entries = p
            .terms()
            .filter(|(m, _)| m.degree() as usize == order)
            .map(|(m, c)| {
                let count = T::from_u64(multinomial(m.exponents()) as u64);
                (m.sorted_indices(), c.clone() / count)
            })
            .collect();
        SymmetricTensor { order, dim: p.nvars(), entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at an arbitrary (not necessarily sorted) index tuple.
    pub fn entry(&self, indices: &[usize]) -> T {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(T::zero)
    }

    /// Multilinear value `Σ h_{i_1…i_d} x¹_{i_1} ⋯ x^d_{i_d}`.
    pub fn eval(&self, points: &[Vec<T>]) -> Result<T> {
        if points.len() != self.order {
            return Err(Error::Arity { order: self.order, found: points.len() });
        }
        if let Some(bad) = points.iter().find(|p| p.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bad.len() });
        }
        let mut total = T::zero();
        for (t, h) in &self.entries {
            let m = Monomial::from_indices(self.dim, t);
            total = total + h.clone() * distinct_permutation_sum(t, m.exponents(), points);
        }
        Ok(total)
    }

    /// The diagonal polynomial `H[x, …, x]`.
    pub fn to_polynomial(&self) -> Polynomial<T> {
        let mut p = Polynomial::zero(self.dim);
        for (t, h) in &self.entries {
            let m = Monomial::from_indices(self.dim, t);
            let count = T::from_u64(multinomial(m.exponents()) as u64);
            p.add_term(m, h.clone() * count);
        }
        p
    }

    pub fn to_f64(&self) -> SymmetricTensor<f64> {
        SymmetricTensor {
            order: self.order,
            dim: self.dim,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
        }
    }
}

/// Row `c` with `H[points] = cᵀ·coeffs` for a homogeneous polynomial with
/// coefficient vector `coeffs` over `basis` (all monomials of degree `points.len()`).
pub fn coefficient_row(basis: &[Monomial], points: &[Vec<f64>]) -> Vec<f64> {
    let d = points.len() as u32;
    let d_fact: f64 = factorial(d);
    basis
        .iter()
        .map(|m| {
            if m.degree() != d {
                return 0.0;
            }
            let t = m.sorted_indices();
            let x: Vec<Vec<f64>> =
                points.iter().map(|p| t.iter().map(|&i| p[i]).collect()).collect();
            permanent(&x) / d_fact
        })
        .collect()
}

/// Tensor values `H[v_{a}]` of a homogeneous polynomial `p` of degree `d` for
/// every multiset `a` of `d` vertex indices, keyed by the multiplicity vector
/// (a monomial in `vertices.len()` variables).
///
/// Uses the expansion `p(Σ λ_j v_j) = Σ_a multinomial(a)·λ^a·H[v_a]`, which
/// costs one polynomial substitution instead of a permanent per tuple.
pub fn vertex_tuple_values(p: &FloatPoly, degree: u32, vertices: &[Vec<f64>]) -> Vec<(Monomial, f64)> {
    let k = vertices.len();
    let n = p.nvars();
    let forms: Vec<Vec<f64>> = (0..n).map(|i| vertices.iter().map(|v| v[i]).collect()).collect();
    let q = p.compose_linear(&forms);
    Monomial::of_degree(k, degree)
        .into_iter()
        .map(|a| {
            let value = q.coeff(&a) / multinomial(a.exponents()) as f64;
            (a, value)
        })
        .collect()
}

/// All multisets of size `d` drawn from `k` items, as sorted index lists.
pub fn multisets(k: usize, d: u32) -> Vec<Vec<usize>> {
    Monomial::of_degree(k, d).iter().map(Monomial::sorted_indices).collect()
}
