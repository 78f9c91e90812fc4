//! Projected explicit Euler for `ẋ = f(x) + η`, `−η ∈ N_S(x)`.
//!
//! Each step moves along `f` and projects back onto `S`; the correction
//! actually applied is reported as `η_used = (x⁺ − x)/Δt − f(x)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cones::PolyhedralCone;
use crate::conic::ConicSystem;
use crate::linalg::{add, dot, norm2, scaled, sub};
use crate::nnls::{least_distance, nnls};
use crate::poly::{FloatPoly, RatPoly};
use crate::sos::SemialgebraicSystem;
use crate::tangency::SemialgebraicSet;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum Constraint {
    Unconstrained,
    Cone(PolyhedralCone),
    Set(SemialgebraicSet),
}

#[derive(Clone, Copy, Debug)]
pub struct ProjectionOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions { tol: 1e-10, max_iter: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct FlowSystem {
    f: Vec<FloatPoly>,
    constraint: Constraint,
    pub projection: ProjectionOptions,
}

impl FlowSystem {
    pub fn new(f: Vec<FloatPoly>, constraint: Constraint) -> Result<Self> {
        let n = f.len();
        let dim = match &constraint {
            Constraint::Unconstrained => n,
            Constraint::Cone(k) => k.dim(),
            Constraint::Set(s) => s.dim(),
        };
        if dim != n {
            return Err(Error::DimensionMismatch { expected: dim, found: n });
        }
        Ok(FlowSystem { f, constraint, projection: ProjectionOptions::default() })
    }

    pub fn from_conic(sys: &ConicSystem) -> Self {
        let f = sys.f().iter().map(RatPoly::to_f64).collect();
        FlowSystem { f, constraint: Constraint::Cone(sys.cone().clone()), projection: ProjectionOptions::default() }
    }

    pub fn from_semialgebraic(sys: &SemialgebraicSystem) -> Self {
        let f = sys.f().iter().map(RatPoly::to_f64).collect();
        FlowSystem { f, constraint: Constraint::Set(sys.set().clone()), projection: ProjectionOptions::default() }
    }

    /// Same field without the constraint.
    pub fn unconstrained(&self) -> Self {
        FlowSystem { f: self.f.clone(), constraint: Constraint::Unconstrained, projection: self.projection }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn eval_f(&self, x: &[f64]) -> Vec<f64> {
        self.f.iter().map(|p| p.eval(x)).collect()
    }

    /// Largest constraint violation at `x` (0 if feasible).
    pub fn violation(&self, x: &[f64]) -> f64 {
        match &self.constraint {
            Constraint::Unconstrained => 0.0,
            Constraint::Cone(k) => (-k.min_slack(x)).max(0.0),
            Constraint::Set(s) => s.violation(x),
        }
    }

    /// Euclidean projection onto the constraint set.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        match &self.constraint {
            Constraint::Unconstrained => Ok(z.to_vec()),
            Constraint::Cone(k) => project_cone(k, z),
            Constraint::Set(s) => project_set(s, z, &self.projection),
        }
    }
}

/// `Π_K(z) = z + Cᵀλ` with `λ = argmin_{λ≥0} ‖z + Cᵀλ‖` (Moreau decomposition).
pub fn project_cone(k: &PolyhedralCone, z: &[f64]) -> Result<Vec<f64>> {
    if k.min_slack(z) >= 0.0 {
        return Ok(z.to_vec());
    }
    let minus_z: Vec<f64> = z.iter().map(|v| -v).collect();
    let lambda = nnls(k.rows(), &minus_z)?;
    let mut y = z.to_vec();
    for (row, l) in k.rows().iter().zip(&lambda) {
        for (yi, ci) in y.iter_mut().zip(row) {
            *yi += l * ci;
        }
    }
    Ok(y)
}

/// Projection onto `{g_i ≥ 0}` (assumed convex) by outer linearisation: every
/// iterate adds the cuts `g_i(y) + ∇g_i(y)·(x − y) ≥ 0` of the constraints it
/// violates and re-solves the least-distance problem over all cuts so far.
pub fn project_set(s: &SemialgebraicSet, z: &[f64], opts: &ProjectionOptions) -> Result<Vec<f64>> {
    let mut y = z.to_vec();
    let mut violation = s.violation(&y);
    if violation <= opts.tol {
        return Ok(y);
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for _ in 0..opts.max_iter {
        let values = s.values(&y);
        for (i, &g) in values.iter().enumerate() {
            if g < opts.tol {
                let grad = s.gradient(i, &y);
                if norm2(&grad) == 0.0 {
                    continue;
                }
                // g + ∇g·(z + u − y) ≥ 0  ⇔  ∇g·u ≥ −g − ∇g·(z − y)
                rhs.push(-g - dot(&grad, &sub(z, &y)));
                rows.push(grad);
            }
        }
        let u = least_distance(&rows, &rhs)?.ok_or(Error::ProjectionNoConvergence { violation })?;
        y = add(z, &u);
        violation = s.violation(&y);
        if violation <= opts.tol {
            return Ok(y);
        }
    }
    Err(Error::ProjectionNoConvergence { violation })
}

/// One step: `x⁺ = Π_S(x + Δt·f(x))`, `η_used = (x⁺ − x)/Δt − f(x)`.
pub fn step(sys: &FlowSystem, x: &[f64], dt: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: x.len() });
    }
    let fx = sys.eval_f(x);
    let z = add(x, &scaled(&fx, dt));
    let next = sys.project(&z)?;
    let eta = scaled(&sub(&next, &z), 1.0 / dt);
    Ok((next, eta))
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `eta_log[k]` is the correction used to reach `states[k]` (zero at `k = 0`)
    pub eta_log: Vec<Vec<f64>>,
    pub v_values: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    /// Largest increase `V(x_{k+1}) − V(x_k)` (negative if strictly decreasing).
    pub fn max_v_increase(&self) -> Option<f64> {
        let v = self.v_values.as_ref()?;
        Some(v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Fixed-step simulation over `[0, T]`; `x0` must be feasible within `1e-8`.
pub fn simulate(sys: &FlowSystem, x0: &[f64], t_end: f64, dt: f64, v: Option<&dyn Fn(&[f64]) -> f64>) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Invalid("time step and horizon must be positive".into()));
    }
    let viol = sys.violation(x0);
    if viol > 1e-8 {
        return Err(Error::InfeasiblePoint { index: 0, value: -viol });
    }
    let steps = num_traits::Float::round(t_end / dt) as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        eta_log: Vec::with_capacity(steps + 1),
        v_values: v.map(|_| Vec::with_capacity(steps + 1)),
    };
    let mut x = x0.to_vec();
    traj.times.push(0.0);
    traj.eta_log.push(vec![0.0; x.len()]);
    if let (Some(vf), Some(vals)) = (v, traj.v_values.as_mut()) {
        vals.push(vf(&x));
    }
    traj.states.push(x.clone());
    for k in 1..=steps {
        let (next, eta) = step(sys, &x, dt)?;
        x = next;
        traj.times.push(k as f64 * dt);
        traj.eta_log.push(eta);
        if let (Some(vf), Some(vals)) = (v, traj.v_values.as_mut()) {
            vals.push(vf(&x));
        }
        traj.states.push(x.clone());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn fp(s: &str, n: usize) -> FloatPoly {
        parse_polynomial(s, n).unwrap().to_f64()
    }

    #[test]
    fn clamp_onto_orthant() {
        let k = PolyhedralCone::nonnegative_orthant(2);
        let y = project_cone(&k, &[-0.1, 0.5]).unwrap();
        assert!(y[0].abs() < 1e-15 && (y[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interior_step_has_no_correction() {
        let sys = FlowSystem::new(vec![fp("-x1", 2), fp("-x2", 2)], Constraint::Cone(PolyhedralCone::nonnegative_orthant(2))).unwrap();
        let (x, eta) = step(&sys, &[1.0, 1.0], 0.1).unwrap();
        assert_eq!(x, vec![0.9, 0.9]);
        assert_eq!(eta, vec![0.0, 0.0]);
    }

    #[test]
    fn projection_onto_disc() {
        let s = SemialgebraicSet::new(2, vec![parse_polynomial("1 - x1^2 - x2^2", 2).unwrap()], vec![(-1.0, 1.0); 2]).unwrap();
        let y = project_set(&s, &[3.0, 4.0], &ProjectionOptions::default()).unwrap();
        assert!((y[0] - 0.6).abs() < 1e-8 && (y[1] - 0.8).abs() < 1e-8);
        assert!(s.violation(&y) <= 1e-10);
    }

    #[test]
    fn linear_decay() {
        let sys = FlowSystem::new(vec![fp("-x1", 2), fp("-x2", 2)], Constraint::Unconstrained).unwrap();
        let traj = simulate(&sys, &[1.0, 0.0], 1.0, 1e-4, None).unwrap();
        let end = traj.last().unwrap()[0];
        assert!((end / num_traits::Float::exp(-1.0f64) - 1.0).abs() < 0.02);
        assert_eq!(traj.len(), 10_001);
    }
}
