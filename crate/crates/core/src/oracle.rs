//! Brute-force re-verification of certificates by dense sampling.
//!
//! Nothing here reuses the LP or SDP assembly: decrease values are computed
//! from the closed-form gradient of `V` and the correction `η` comes from
//! the projection in [`crate::tangency::eta_projection`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::{cone_orthant_sections, face_sections, Simplex};
use crate::conic::{ConicSystem, RationalCandidate};
use crate::linalg::{add, dot, norm2, powi};
use crate::poly::FloatPoly;
use crate::sos::SemialgebraicSystem;
use crate::tangency::eta_projection;
use crate::{Error, Result};

/// Sample tolerance for the conic inequalities.
pub const CONIC_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    /// the minimum (or maximum, for upper-bound checks) over the samples
    pub extreme: f64,
    /// sample attaining `extreme`
    pub witness: Option<Vec<f64>>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    /// `(point, quantity, value)` triples when recording was requested
    pub records: Vec<(Vec<f64>, String, f64)>,
}

impl Report {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let w = c.witness.as_ref().map_or_else(|| String::from("-"), |w| format!("{w:?}"));
            out.push_str(&format!(
                "{} {} samples={} extreme={:e} witness={}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.samples,
                c.extreme,
                w
            ));
        }
        out
    }
}

/// Running minimum (or maximum) with its witness.
struct Tracker {
    name: String,
    maximize: bool,
    samples: usize,
    extreme: f64,
    witness: Option<Vec<f64>>,
}

impl Tracker {
    fn new(name: String, maximize: bool) -> Self {
        let extreme = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        Tracker { name, maximize, samples: 0, extreme, witness: None }
    }

    fn push(&mut self, x: &[f64], v: f64) {
        self.samples += 1;
        let better = if self.maximize { v > self.extreme } else { v < self.extreme };
        if better || v.is_nan() {
            self.extreme = v;
            self.witness = Some(x.to_vec());
        }
    }

    fn finish(self, pass: impl Fn(f64) -> bool) -> Check {
        let pass = self.samples > 0 && pass(self.extreme);
        Check { name: self.name, samples: self.samples, extreme: self.extreme, witness: self.witness, pass }
    }
}

/// Points `Σ (a_i/m)·v_i` for all compositions `a` of `m` into `k` parts,
/// with the smallest `m` giving at least `target` points.
pub fn barycentric_grid(k: usize, target: usize) -> Vec<Vec<f64>> {
    if k == 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![vec![1.0]];
    }
    let mut m = 1usize;
    while count_compositions(m, k) < target as u128 {
        m += 1;
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; k];
    compositions(&mut out, &mut current, 0, m, m);
    out
}

fn count_compositions(m: usize, k: usize) -> u128 {
    // C(m + k − 1, k − 1)
    let mut c: u128 = 1;
    for i in 0..(k - 1) as u128 {
        c = c * (m as u128 + 1 + i) / (i + 1);
    }
    c
}

fn compositions(out: &mut Vec<Vec<f64>>, current: &mut Vec<usize>, pos: usize, remaining: usize, m: usize) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.iter().map(|&a| a as f64 / m as f64).collect());
        return;
    }
    for a in 0..=remaining {
        current[pos] = a;
        compositions(out, current, pos + 1, remaining - a, m);
    }
}

fn grid_points(simplex: &Simplex, target: usize) -> Vec<Vec<f64>> {
    barycentric_grid(simplex.num_vertices(), target).iter().map(|l| simplex.point(l)).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct ConicOracleOptions {
    /// grid points per section simplex
    pub density: usize,
    pub tol: f64,
    /// activity band for cone rows when computing `η`
    pub active_tol: f64,
    pub record: bool,
}

impl Default for ConicOracleOptions {
    fn default() -> Self {
        ConicOracleOptions { density: 10_000, tol: CONIC_TOL, active_tol: 1e-9, record: false }
    }
}

/// `−‖x‖^{2(r+1)}·⟨∇V(x), field⟩`, i.e. the decrease polynomial recomputed
/// from the closed-form gradient.
fn scaled_decrease(v: &RationalCandidate, x: &[f64], field: &[f64]) -> f64 {
    -powi(dot(x, x), v.r as i32 + 1) * dot(&v.gradient(x), field)
}

/// Checks `h ≥ 0` and `s₀ ≥ 0` on every section and `s_i ≥ 0` on every face
/// section, up to `−tol`.
pub fn verify_conic(v: &RationalCandidate, system: &ConicSystem, opts: &ConicOracleOptions) -> Result<Report> {
    let cone = system.cone();
    let mut report = Report::default();
    let mut pos = Tracker::new("positivity".into(), false);
    let mut dec = Tracker::new("decrease".into(), false);
    for section in cone_orthant_sections(cone)? {
        for x in grid_points(&section.simplex, opts.density) {
            let h = v.h.eval(&x);
            let s0 = scaled_decrease(v, &x, &system.eval_f(&x));
            pos.push(&x, h);
            dec.push(&x, s0);
            if opts.record {
                report.records.push((x.clone(), "h".into(), h));
                report.records.push((x, "s0".into(), s0));
            }
        }
    }
    let tol = opts.tol;
    report.checks.push(pos.finish(|m| m >= -tol));
    report.checks.push(dec.finish(|m| m >= -tol));
    for i in 0..cone.num_faces() {
        let name = format!("face[{}]", i + 1);
        let mut t = Tracker::new(name.clone(), false);
        for section in face_sections(cone, i)? {
            for x in grid_points(&section.simplex, opts.density) {
                let fx = system.eval_f(&x);
                let grads: Vec<Vec<f64>> = cone
                    .rows()
                    .iter()
                    .filter(|c| dot(c, &x).abs() <= opts.active_tol * norm2(c).max(1.0))
                    .cloned()
                    .collect();
                let eta = eta_projection(&fx, &grads)?;
                let s = scaled_decrease(v, &x, &add(&fx, &eta));
                t.push(&x, s);
                if opts.record {
                    report.records.push((x, name.clone(), s));
                }
            }
        }
        if t.samples > 0 {
            report.checks.push(t.finish(|m| m >= -tol));
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug)]
pub struct SosOracleOptions {
    pub samples: usize,
    pub seed: u64,
    pub shells: [f64; 3],
    pub shell_samples: usize,
    pub band: f64,
    pub boundary_tol: f64,
    pub record: bool,
}

impl Default for SosOracleOptions {
    fn default() -> Self {
        SosOracleOptions {
            samples: 10_000,
            seed: 0,
            shells: [1e-2, 1e-1, 1.0],
            shell_samples: 1_000,
            band: 1e-6,
            boundary_tol: 1e-9,
            record: false,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    crate::linalg::sqrt(-2.0 * num_traits::Float::ln(u1)) * num_traits::Float::cos(2.0 * core::f64::consts::PI * u2)
}

/// Samples of `S` by rejection from its bounding box.
pub fn sample_set(system: &SemialgebraicSystem, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let set = system.set();
    let mut out = Vec::with_capacity(count);
    let max_attempts = count.saturating_mul(1000).max(1000);
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let x: Vec<f64> = set
            .bbox()
            .iter()
            .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect();
        if set.contains(&x, 0.0) {
            out.push(x);
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid("no sample of the bounding box lies in the set".into()));
    }
    Ok(out)
}

/// Newton projection of `x` onto `{g_j = 0}` along `∇g_j`.
fn onto_level_set(g: &FloatPoly, grad: &[FloatPoly], x: &[f64]) -> Option<Vec<f64>> {
    let mut y = x.to_vec();
    for _ in 0..50 {
        let v = g.eval(&y);
        if v.abs() <= 1e-13 {
            return Some(y);
        }
        let d: Vec<f64> = grad.iter().map(|p| p.eval(&y)).collect();
        let nn = dot(&d, &d);
        if nn == 0.0 {
            return None;
        }
        for (yi, di) in y.iter_mut().zip(&d) {
            *yi -= v / nn * di;
        }
    }
    (g.eval(&y).abs() <= 1e-13).then_some(y)
}

/// Checks `V > 0` and `⟨∇V, f⟩ < 0` away from the origin and
/// `⟨∇V, ∇g_j⟩ ≤ tol` on the bands `|g_j| ≤ band`.
pub fn verify_sos(v: &FloatPoly, system: &SemialgebraicSystem, opts: &SosOracleOptions) -> Result<Report> {
    let n = system.dim();
    if v.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.nvars() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points = sample_set(system, opts.samples, &mut rng)?;
    let set = system.set();
    for &rho in &opts.shells {
        for _ in 0..opts.shell_samples {
            let u: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
            let nu = norm2(&u);
            if nu == 0.0 {
                continue;
            }
            let x: Vec<f64> = u.iter().map(|ui| rho * ui / nu).collect();
            if set.contains(&x, 0.0) {
                points.push(x);
            }
        }
    }
    let grad_v = v.gradient();
    let eval_grad = |x: &[f64]| -> Vec<f64> { grad_v.iter().map(|p| p.eval(x)).collect() };
    let mut report = Report::default();
    let mut pos = Tracker::new("positivity".into(), false);
    let mut dec = Tracker::new("decrease".into(), true);
    for x in &points {
        if norm2(x) < 1e-12 {
            continue;
        }
        let vx = v.eval(x);
        let d = dot(&eval_grad(x), &system.eval_f(x));
        pos.push(x, vx);
        dec.push(x, d);
        if opts.record {
            report.records.push((x.clone(), "V".into(), vx));
            report.records.push((x.clone(), "dV.f".into(), d));
        }
    }
    report.checks.push(pos.finish(|m| m > 0.0));
    report.checks.push(dec.finish(|m| m < 0.0));

    let band_target = (opts.samples / 10).max(1);
    for j in 0..set.num_generators() {
        let g = &set.float_generators()[j];
        let grad_g = g.gradient();
        let name = format!("boundary[{}]", j + 1);
        let mut t = Tracker::new(name.clone(), true);
        let mut attempts = 0;
        while t.samples < band_target && attempts < band_target * 100 {
            attempts += 1;
            let x: Vec<f64> = set
                .bbox()
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect();
            let Some(y) = onto_level_set(g, &grad_g, &x) else { continue };
            if g.eval(&y).abs() > opts.band || !set.contains(&y, opts.band) {
                continue;
            }
            let gg: Vec<f64> = grad_g.iter().map(|p| p.eval(&y)).collect();
            let d = dot(&eval_grad(&y), &gg);
            t.push(&y, d);
            if opts.record {
                report.records.push((y, name.clone(), d));
            }
        }
        if t.samples > 0 {
            let tol = opts.boundary_tol;
            report.checks.push(t.finish(|m| m <= tol));
        } else {
            log::warn!("no samples found on the band of generator {}", j + 1);
        }
    }
    Ok(report)
}

/// Largest `‖∇V − ∇_fd V‖ / ‖∇V‖` over `points`, with central differences of
/// step `1e-5·max(1, |x_i|)`.
pub fn fd_gradient_check(v: &RationalCandidate, points: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in points {
        let g = v.gradient(x);
        let mut fd = vec![0.0; x.len()];
        for i in 0..x.len() {
            let h = 1e-5 * x[i].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            fd[i] = (v.value(&xp) - v.value(&xm)) / (xp[i] - xm[i]);
        }
        let diff: f64 = norm2(&g.iter().zip(&fd).map(|(a, b)| a - b).collect::<Vec<_>>());
        let scale = norm2(&g).max(f64::MIN_POSITIVE);
        worst = worst.max(diff / scale);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::PolyhedralCone;
    use crate::poly::{parse_polynomial, RatPoly};
    use crate::tangency::SemialgebraicSet;

    fn p(s: &str) -> RatPoly {
        parse_polynomial(s, 2).unwrap()
    }

    fn example3() -> ConicSystem {
        let k = PolyhedralCone::new(2, vec![vec![-0.25, 1.0], vec![1.0, -0.25]]).unwrap();
        ConicSystem::new(vec![p("-x1 - 2*x2"), p("-x1 - x2")], k).unwrap()
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(barycentric_grid(2, 10_000).len(), 10_000);
        let g = barycentric_grid(3, 10_000);
        assert!(g.len() >= 10_000 && g.len() < 10_300);
        assert!(g.iter().all(|l| (l.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn paper_candidate_on_example3() {
        let v = RationalCandidate::new(p("2.9*x1^2 + x1*x2 + x2^2").to_f64(), 0).unwrap();
        let report = verify_conic(&v, &example3(), &ConicOracleOptions::default()).unwrap();
        assert!(report.pass(), "{}", report.summary());
        let x = [4.0, 1.0];
        let fx = example3().eval_f(&x);
        let eta = eta_projection(&fx, &[vec![-0.25, 1.0]]).unwrap();
        let d = dot(&v.gradient(&x), &add(&fx, &eta));
        assert!((d + 175.3).abs() < 0.1);
    }

    #[test]
    fn negative_h_fails() {
        let sys = ConicSystem::new(vec![p("-x1"), p("-x2")], PolyhedralCone::nonnegative_orthant(2)).unwrap();
        let v = RationalCandidate::new(p("-x1^2").to_f64(), 0).unwrap();
        let report = verify_conic(&v, &sys, &ConicOracleOptions::default()).unwrap();
        assert!(!report.pass());
        let c = report.check("positivity").unwrap();
        let w = c.witness.as_ref().unwrap();
        assert!(-w[0] * w[0] <= c.extreme + 1e-12);
    }

    #[test]
    fn example4_candidates() {
        let set = SemialgebraicSet::new(2, vec![p("x1 - x2^2"), p("1 - x1")], vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
        let sys = SemialgebraicSystem::new(vec![p("-x1^2"), p("0")], set).unwrap();
        let opts = SosOracleOptions::default();
        let good = verify_sos(&p("x1^2 + x2^2").to_f64(), &sys, &opts).unwrap();
        assert!(good.pass(), "{}", good.summary());
        let neg = verify_sos(&p("-x1^2 - x2^2").to_f64(), &sys, &opts).unwrap();
        assert!(!neg.check("positivity").unwrap().pass);
        let x1sq = verify_sos(&p("x1^2").to_f64(), &sys, &opts).unwrap();
        assert!(!x1sq.pass());
        assert!(!x1sq.check("boundary[1]").unwrap().pass);
    }

    #[test]
    fn gradient_of_quadratic() {
        let v = RationalCandidate::new(p("x1^2 + x2^2").to_f64(), 0).unwrap();
        assert!(fd_gradient_check(&v, &[vec![0.3, -2.0], vec![5.0, 1.0]]) <= 1e-10);
    }
}
