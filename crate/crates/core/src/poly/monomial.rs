use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;


/// Exponent vector `(i_1, …, i_n)` of `x1^{i_1} ⋯ xn^{i_n}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    /// Monomial whose exponent `i` counts the occurrences of `i` in `indices`.
    pub fn from_indices(nvars: usize, indices: &[usize]) -> Self {
        let mut e = vec![0; nvars];
        for &i in indices {
            e[i] += 1;
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `(e, x^{m − e_i})` such that `∂/∂x_i x^m = e · x^{m − e_i}`.
    pub fn derivative(&self, i: usize) -> Option<(u32, Monomial)> {
        let e = self.0[i];
        if e == 0 {
            return None;
        }
        let mut d = self.0.clone();
        d[i] -= 1;
        Some((e, Monomial(d)))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&e, &xi)| if e == 0 { 1.0 } else { crate::linalg::powi(xi, e as i32) }).product()
    }

    /// Sorted index tuple `(i_1 ≤ … ≤ i_d)` of the tensor entry housing this monomial.
    pub fn sorted_indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &e)| core::iter::repeat(i).take(e as usize)).collect()
    }

    /// All monomials of exact degree `d`, in ascending monomial order.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut current = vec![0u32; nvars];
        fill(&mut out, &mut current, 0, d);
        out
    }

    /// All monomials of degree `lo ..= hi`, in ascending monomial order.
    pub fn degree_range(nvars: usize, lo: u32, hi: u32) -> Vec<Monomial> {
        (lo..=hi).flat_map(|d| Monomial::of_degree(nvars, d)).collect()
    }
}

fn fill(out: &mut Vec<Monomial>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(Monomial(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

impl Ord for Monomial {
    /// Graded order: lower total degree first; within a degree the exponent
    /// vectors are compared lexicographically with larger exponents first, so
    /// `x1^2 < x1*x2 < x2^2`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_sorted_and_complete() {
        let ms = Monomial::of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ms[0].exponents(), &[2, 0, 0]);
        assert_eq!(ms[5].exponents(), &[0, 0, 2]);
        let all = Monomial::degree_range(2, 0, 2);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sorted_indices_round_trip() {
        let m = Monomial::new(vec![2, 0, 1]);
        assert_eq!(m.sorted_indices(), vec![0, 0, 2]);
        assert_eq!(Monomial::from_indices(3, &[2, 0, 0]), m);
    }
}
