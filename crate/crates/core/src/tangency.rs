//! Active constraints, the normal-cone correction `η`, and its polynomial
//! branches on the faces of a polyhedral cone.

use alloc::vec::Vec;

use crate::cones::PolyhedralCone;
use crate::linalg::{add, dot, norm2};
use crate::nnls::nnls;
use crate::poly::{dot as poly_dot, rational_from_f64, FloatPoly, RatPoly, Rational};
use crate::{Error, Result};

/// Default activity band `|g_i(x)| ≤ τ`.
pub const DEFAULT_ACTIVE_TOL: f64 = 1e-9;

/// `S = {x : g_i(x) ≥ 0}` with a bounding box used by samplers.
#[derive(Clone, Debug)]
pub struct SemialgebraicSet {
    dim: usize,
    generators: Vec<RatPoly>,
    float_generators: Vec<FloatPoly>,
    gradients: Vec<Vec<FloatPoly>>,
    bbox: Vec<(f64, f64)>,
}

impl SemialgebraicSet {
    /// Validates dimensions and that the origin belongs to the set.
    pub fn new(dim: usize, generators: Vec<RatPoly>, bbox: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.nvars() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.nvars() });
        }
        if bbox.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: bbox.len() });
        }
        if bbox.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::Invalid("bounding box intervals must be finite with lo ≤ hi".into()));
        }
        let origin = alloc::vec![0.0; dim];
        let float_generators: Vec<FloatPoly> = generators.iter().map(RatPoly::to_f64).collect();
        for (i, g) in float_generators.iter().enumerate() {
            let v = g.eval(&origin);
            if v < 0.0 {
                return Err(Error::InfeasiblePoint { index: i, value: v });
            }
        }
        let gradients = float_generators.iter().map(FloatPoly::gradient).collect();
        Ok(SemialgebraicSet { dim, generators, float_generators, gradients, bbox })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RatPoly] {
        &self.generators
    }

    pub fn float_generators(&self) -> &[FloatPoly] {
        &self.float_generators
    }

    pub fn bbox(&self) -> &[(f64, f64)] {
        &self.bbox
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        self.float_generators.iter().map(|g| g.eval(x)).collect()
    }

    pub fn gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        self.gradients[i].iter().map(|p| p.eval(x)).collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.float_generators.iter().all(|g| g.eval(x) >= -tol)
    }

    /// Largest violation `max_i max(0, −g_i(x))`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.float_generators.iter().map(|g| -g.eval(x)).fold(0.0, f64::max)
    }

    /// Indices `i` with `|g_i(x)| ≤ tol`.
    pub fn active_set(&self, x: &[f64], tol: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, g) in self.float_generators.iter().enumerate() {
            let v = g.eval(x);
            if v < -tol {
                return Err(Error::InfeasiblePoint { index: i, value: v });
            }
            if v <= tol {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// `η` at `x` for the field value `f_at_x`, using the constraints active
    /// within `tol`.
    pub fn eta(&self, f_at_x: &[f64], x: &[f64], tol: f64) -> Result<Vec<f64>> {
        let active = self.active_set(x, tol)?;
        let grads: Vec<Vec<f64>> = active.iter().map(|&i| self.gradient(i, x)).collect();
        eta_projection(f_at_x, &grads)
    }
}

/// The correction `η = Σ λ_j ∇g_j` with `λ ≥ 0` minimising `‖f + η‖`, so
/// that `−η` is the projection of `f` onto the normal cone spanned by the
/// `−∇g_j` and `f + η` is tangent.
pub fn eta_projection(f_at_x: &[f64], gradients: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = f_at_x.len();
    if gradients.is_empty() {
        return Ok(alloc::vec![0.0; n]);
    }
    for (j, g) in gradients.iter().enumerate() {
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
        if norm2(g) == 0.0 {
            return Err(Error::Invalid(alloc::format!("active constraint {} has zero gradient", j + 1)));
        }
    }
    let minus_f: Vec<f64> = f_at_x.iter().map(|v| -v).collect();
    let lambda = nnls(gradients, &minus_f)?;
    let mut eta = alloc::vec![0.0; n];
    for (g, l) in gradients.iter().zip(&lambda) {
        for (e, gi) in eta.iter_mut().zip(g) {
            *e += l * gi;
        }
    }
    Ok(eta)
}

/// Multipliers `λ` as well as `η`, for callers that check complementarity.
pub fn eta_multipliers(f_at_x: &[f64], gradients: &[Vec<f64>]) -> Result<Vec<f64>> {
    let minus_f: Vec<f64> = f_at_x.iter().map(|v| -v).collect();
    nnls(gradients, &minus_f)
}

/// The two polynomial forms of `η` on face `F_i = {c_i·x = 0}`:
/// branch A is `η = 0` (where `w ≥ 0`), branch B is
/// `η = −(w/‖c_i‖²)·c_i` (where `w ≤ 0`), with `w = ⟨c_i, f⟩`.
#[derive(Clone, Debug)]
pub struct FaceBranches {
    pub c: Vec<Rational>,
    pub norm_sq: Rational,
    /// switching polynomial `w = ⟨c_i, f⟩`
    pub w: RatPoly,
    /// `‖c_i‖²·η_B = −w·c_i`, free of denominators
    pub eta_b_scaled: Vec<RatPoly>,
}

impl FaceBranches {
    /// Branch B `η` itself.
    pub fn eta_b(&self) -> Vec<RatPoly> {
        let inv = Rational::from_integer(1.into()) / self.norm_sq.clone();
        self.eta_b_scaled.iter().map(|p| p.scale(&inv)).collect()
    }

    /// Numeric branch B `η` at `x`.
    pub fn eta_b_at(&self, f_at_x: &[f64]) -> Vec<f64> {
        let c: Vec<f64> = self.c.iter().map(crate::poly::Coeff::to_f64).collect();
        let w = dot(&c, f_at_x);
        let s = w / dot(&c, &c);
        c.iter().map(|ci| -s * ci).collect()
    }
}

pub fn face_eta_polynomial(cone: &PolyhedralCone, i: usize, f: &[RatPoly]) -> Result<FaceBranches> {
    let n = cone.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }
    let row = cone
        .rows()
        .get(i)
        .ok_or_else(|| Error::Invalid(alloc::format!("face index {} out of range", i + 1)))?;
    let c: Vec<Rational> = row.iter().map(|&v| rational_from_f64(v)).collect();
    let norm_sq = c.iter().fold(Rational::from_integer(0.into()), |acc, v| acc + v.clone() * v.clone());
    let c_polys: Vec<RatPoly> = c.iter().map(|v| RatPoly::constant(n, v.clone())).collect();
    let w = poly_dot(&c_polys, f);
    let eta_b_scaled = c.iter().map(|ci| w.scale(&-ci.clone())).collect();
    Ok(FaceBranches { c, norm_sq, w, eta_b_scaled })
}

/// `f + η` at `x` (helper for simulation and oracles).
pub fn projected_field(f_at_x: &[f64], gradients: &[Vec<f64>]) -> Result<Vec<f64>> {
    Ok(add(f_at_x, &eta_projection(f_at_x, gradients)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use alloc::vec;

    fn example4() -> SemialgebraicSet {
        let g = vec![parse_polynomial("x1 - x2^2", 2).unwrap(), parse_polynomial("1 - x1", 2).unwrap()];
        SemialgebraicSet::new(2, g, vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap()
    }

    #[test]
    fn active_sets() {
        let s = example4();
        assert_eq!(s.active_set(&[1.0, 0.0], 1e-9).unwrap(), vec![1]);
        assert!(s.active_set(&[0.5, 0.1], 1e-9).unwrap().is_empty());
        assert_eq!(s.active_set(&[1.0, 1.0], 1e-9).unwrap(), vec![0, 1]);
        assert!(matches!(s.active_set(&[2.0, 0.0], 1e-9), Err(Error::InfeasiblePoint { index: 1, .. })));
    }

    #[test]
    fn origin_must_be_feasible() {
        let g = vec![parse_polynomial("x1 - 1", 1).unwrap()];
        assert!(SemialgebraicSet::new(1, g, vec![(0.0, 2.0)]).is_err());
    }

    #[test]
    fn single_face_projection() {
        let f = [-6.0, -5.0];
        let c = vec![-0.25, 1.0];
        let eta = eta_projection(&f, &[c.clone()]).unwrap();
        let expected = [-0.25 * 3.5 / 1.0625, 3.5 / 1.0625];
        assert!((eta[0] - expected[0]).abs() < 1e-12 && (eta[1] - expected[1]).abs() < 1e-12);
        assert!((eta[0] - -0.82353).abs() < 1e-5 && (eta[1] - 3.29412).abs() < 1e-5);
        assert!(dot(&c, &add(&f, &eta)).abs() < 1e-12);
    }

    #[test]
    fn interior_and_tangent_cases() {
        assert_eq!(eta_projection(&[1.0, 2.0], &[]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(eta_projection(&[1.0, 2.0], &[vec![1.0, 0.0]]).unwrap(), vec![0.0, 0.0]);
        assert!(eta_projection(&[1.0, 2.0], &[vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn branch_b_on_example_face() {
        let k = PolyhedralCone::new(2, vec![vec![-0.25, 1.0], vec![1.0, -0.25]]).unwrap();
        let f = vec![parse_polynomial("-x1 - 2*x2", 2).unwrap(), parse_polynomial("-x1 - x2", 2).unwrap()];
        let br = face_eta_polynomial(&k, 0, &f).unwrap();
        assert!(br.w.eval(&[0.8, 0.2]) < 0.0);
        let x = [0.8, 0.2];
        let fx = [-1.2, -1.0];
        let eta_poly: Vec<f64> = br.eta_b().iter().map(|p| p.eval(&x)).collect();
        let eta_nnls = eta_projection(&fx, &[vec![-0.25, 1.0]]).unwrap();
        assert!((eta_poly[0] - eta_nnls[0]).abs() < 1e-12 && (eta_poly[1] - eta_nnls[1]).abs() < 1e-12);
    }
}
