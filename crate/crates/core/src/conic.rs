//! LP hierarchy for rational Lyapunov functions `V = h/‖x‖^{2r}` on a
//! polyhedral cone.
//!
//! For a homogeneous `h` of degree `d`, positivity of `h` and of the decrease
//! polynomials `s₀`, `s_i` on the ℓ1 sections of the cone and its faces is
//! enforced through the tensor values at vertex multisets of each cell of a
//! simplicial partition; all of them are linear in the coefficients of `h`.
//! The LP maximises a uniform margin `t` under `|coefficients| ≤ 1`, and cells
//! whose rows bind at the optimum are bisected until `t` clears the
//! acceptance threshold or the sweep budget runs out.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cones::{cone_orthant_sections, face_sections, PolyhedralCone, Section, SimplicialPartition};
use crate::linalg::{dot, powi};
use crate::linprog::{LinearProgram, LpOptions, LpStatus, Relation, Sense};
use crate::poly::{dot as poly_dot, vertex_tuple_values, FloatPoly, Monomial, RatPoly, Rational};
use crate::tangency::{face_eta_polynomial, FaceBranches};
use crate::{Error, Result};

/// `ẋ = f(x) − N_K(x)` with `f` homogeneous of degree `d_f`.
#[derive(Clone, Debug)]
pub struct ConicSystem {
    f: Vec<RatPoly>,
    cone: PolyhedralCone,
    degree: u32,
}

impl ConicSystem {
    pub fn new(f: Vec<RatPoly>, cone: PolyhedralCone) -> Result<Self> {
        let n = cone.dim();
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.len() });
        }
        if let Some(p) = f.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
        }
        let mut degree = None;
        for p in f.iter().filter(|p| !p.is_zero()) {
            let d = p.is_homogeneous().ok_or(Error::NotHomogeneous)?;
            if d == 0 {
                return Err(Error::Invalid("f(0) must vanish".into()));
            }
            match degree {
                None => degree = Some(d),
                Some(e) if e != d => return Err(Error::NotHomogeneous),
                _ => {}
            }
        }
        Ok(ConicSystem { f, cone, degree: degree.unwrap_or(1) })
    }

    pub fn f(&self) -> &[RatPoly] {
        &self.f
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    /// Homogeneity degree `d_f` of the field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval_f(&self, x: &[f64]) -> Vec<f64> {
        self.f.iter().map(|p| p.eval(x)).collect()
    }
}

/// `V = h/‖x‖₂^{2r}` with `h` homogeneous.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCandidate {
    pub h: FloatPoly,
    pub r: u32,
}

impl RationalCandidate {
    pub fn new(h: FloatPoly, r: u32) -> Result<Self> {
        h.is_homogeneous().ok_or(Error::NotHomogeneous)?;
        Ok(RationalCandidate { h, r })
    }

    pub fn degree(&self) -> u32 {
        self.h.degree()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.h.eval(x) / powi(dot(x, x), self.r as i32)
    }

    /// `∇V = (‖x‖²∇h − 2r·h·x) / ‖x‖^{2(r+1)}`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        if self.r == 0 {
            return (0..x.len()).map(|i| self.h.partial(i).eval(x)).collect();
        }
        let nsq = dot(x, x);
        let hv = self.h.eval(x);
        let denom = powi(nsq, self.r as i32 + 1);
        (0..x.len())
            .map(|i| (nsq * self.h.partial(i).eval(x) - 2.0 * self.r as f64 * hv * x[i]) / denom)
            .collect()
    }
}

fn rat(v: u64) -> Rational {
    Rational::from_integer(v.into())
}

fn x_vector(n: usize) -> Vec<RatPoly> {
    (0..n).map(|i| RatPoly::var(n, i)).collect()
}

/// `s₀` for each basis monomial `m`: `−‖x‖²⟨∇m, f⟩ + 2r·m·⟨x, f⟩`.
pub fn build_s0(basis: &[Monomial], r: u32, f: &[RatPoly]) -> Vec<RatPoly> {
    let n = f.len();
    let nsq = RatPoly::norm_squared(n);
    let xf = poly_dot(&x_vector(n), f);
    basis
        .iter()
        .map(|m| {
            let mp = RatPoly::monomial(m.clone(), rat(1));
            let grad_f = poly_dot(&mp.gradient(), f);
            let first = -&(&nsq * &grad_f);
            let second = (&mp * &xf).scale(&rat(2 * r as u64));
            &first + &second
        })
        .collect()
}

/// Which `η` branch to use on a face cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `η = 0`
    A,
    /// `η = −(⟨c, f⟩/‖c‖²)·c`, rows scaled by `‖c‖²`
    B,
}

/// `s_i` for each basis monomial: `−⟨‖x‖²∇m − 2r·m·x, f + η⟩`, with branch B
/// multiplied through by `‖c_i‖²`.
pub fn build_si(basis: &[Monomial], r: u32, f: &[RatPoly], face: &FaceBranches, branch: Branch) -> Vec<RatPoly> {
    let n = f.len();
    let nsq = RatPoly::norm_squared(n);
    let xs = x_vector(n);
    let field: Vec<RatPoly> = match branch {
        Branch::A => f.to_vec(),
        Branch::B => f
            .iter()
            .zip(&face.eta_b_scaled)
            .map(|(fi, ei)| &fi.scale(&face.norm_sq) + ei)
            .collect(),
    };
    basis
        .iter()
        .map(|m| {
            let mp = RatPoly::monomial(m.clone(), rat(1));
            let grad: Vec<RatPoly> = mp
                .gradient()
                .iter()
                .zip(&xs)
                .map(|(g, xi)| &(&nsq * g) - &(&mp * xi).scale(&rat(2 * r as u64)))
                .collect();
            -&poly_dot(&grad, &field)
        })
        .collect()
}

/// Partition of one ℓ1 section simplex, or of a face section when `face` is set.
#[derive(Clone, Debug)]
pub struct PartitionedSection {
    pub face: Option<usize>,
    pub section: Section,
    pub partition: SimplicialPartition,
}

/// Initial (unrefined) partitions of every section and face section.
pub fn initial_partitions(cone: &PolyhedralCone) -> Result<Vec<PartitionedSection>> {
    let mut out = Vec::new();
    for section in cone_orthant_sections(cone)? {
        let partition = SimplicialPartition::new(section.simplex.clone());
        out.push(PartitionedSection { face: None, section, partition });
    }
    for i in 0..cone.num_faces() {
        for section in face_sections(cone, i)? {
            let partition = SimplicialPartition::new(section.simplex.clone());
            out.push(PartitionedSection { face: Some(i), section, partition });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Positivity,
    Decrease,
    Face(usize, Branch),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowOrigin {
    pub partition: usize,
    pub cell: usize,
    pub kind: RowKind,
}

/// The assembled LP (variables: coefficients of `h` over `basis`, then `t`).
#[derive(Clone, Debug)]
pub struct ConicLp {
    pub lp: LinearProgram,
    pub basis: Vec<Monomial>,
    pub origins: Vec<RowOrigin>,
    /// true when two face sections share a vertex, i.e. corner points are
    /// covered only by the rows of both adjacent faces
    pub corner_conservative: bool,
}

/// Sign pattern of a polynomial over a cell from its tensor values: `Some(true)`
/// if all are ≥ 0 (so the polynomial is ≥ 0 on the cell), `Some(false)` if all
/// are ≤ 0, `None` if mixed.
fn tensor_sign(p: &FloatPoly, degree: u32, vertices: &[Vec<f64>]) -> Option<bool> {
    let vals = vertex_tuple_values(p, degree, vertices);
    if vals.iter().all(|(_, v)| *v >= 0.0) {
        Some(true)
    } else if vals.iter().all(|(_, v)| *v <= 0.0) {
        Some(false)
    } else {
        None
    }
}

/// Rows `Σ_k coeffs_k · P_k[tuple] − t ≥ 0` for every vertex multiset of the cell.
fn tuple_rows(polys: &[FloatPoly], degree: u32, vertices: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let per_basis: Vec<Vec<f64>> = polys
        .iter()
        .map(|p| vertex_tuple_values(p, degree, vertices).into_iter().map(|(_, v)| v).collect())
        .collect();
    let ntuples = per_basis.first().map_or(0, Vec::len);
    (0..ntuples)
        .map(|a| {
            let mut row: Vec<f64> = per_basis.iter().map(|vals| vals[a]).collect();
            row.push(-1.0);
            row
        })
        .collect()
}

pub fn assemble_lp(system: &ConicSystem, d: u32, r: u32, partitions: &[PartitionedSection]) -> Result<ConicLp> {
    if partitions.iter().all(|p| p.partition.is_empty()) || partitions.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let n = system.dim();
    let basis = Monomial::of_degree(n, d);
    let nb = basis.len();
    let ds = d + system.degree() + 1;
    let h_polys: Vec<FloatPoly> = basis.iter().map(|m| FloatPoly::monomial(m.clone(), 1.0)).collect();
    let s0: Vec<FloatPoly> = build_s0(&basis, r, system.f()).iter().map(RatPoly::to_f64).collect();

    let mut faces = Vec::new();
    for i in 0..system.cone().num_faces() {
        let fb = face_eta_polynomial(system.cone(), i, system.f())?;
        let a: Vec<FloatPoly> = build_si(&basis, r, system.f(), &fb, Branch::A).iter().map(RatPoly::to_f64).collect();
        let b: Vec<FloatPoly> = build_si(&basis, r, system.f(), &fb, Branch::B).iter().map(RatPoly::to_f64).collect();
        faces.push((fb.w.to_f64(), a, b));
    }

    let mut objective = vec![0.0; nb + 1];
    objective[nb] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for k in 0..nb {
        lp.set_bounds(k, -1.0, 1.0);
    }
    let mut origins = Vec::new();
    let mut push = |lp: &mut LinearProgram, rows: Vec<Vec<f64>>, origin: RowOrigin| {
        for row in rows {
            lp.add_row(row, Relation::Ge, 0.0);
            origins.push(origin);
        }
    };
    for (pi, ps) in partitions.iter().enumerate() {
        for (ci, cell) in ps.partition.cells().iter().enumerate() {
            let verts = cell.vertices();
            match ps.face {
                None => {
                    let origin = RowOrigin { partition: pi, cell: ci, kind: RowKind::Positivity };
                    push(&mut lp, tuple_rows(&h_polys, d, verts), origin);
                    let origin = RowOrigin { partition: pi, cell: ci, kind: RowKind::Decrease };
                    push(&mut lp, tuple_rows(&s0, ds, verts), origin);
                }
                Some(i) => {
                    let (w, a, b) = &faces[i];
                    let sign = tensor_sign(w, system.degree(), verts);
                    if sign != Some(false) {
                        let origin = RowOrigin { partition: pi, cell: ci, kind: RowKind::Face(i, Branch::A) };
                        push(&mut lp, tuple_rows(a, ds, verts), origin);
                    }
                    if sign != Some(true) {
                        let origin = RowOrigin { partition: pi, cell: ci, kind: RowKind::Face(i, Branch::B) };
                        push(&mut lp, tuple_rows(b, ds, verts), origin);
                    }
                }
            }
        }
    }
    if lp.rows.is_empty() {
        return Err(Error::EmptyPartition);
    }

    let mut corner_conservative = false;
    let face_parts: Vec<&PartitionedSection> = partitions.iter().filter(|p| p.face.is_some()).collect();
    'outer: for (a, pa) in face_parts.iter().enumerate() {
        for pb in &face_parts[a + 1..] {
            if pa.face == pb.face {
                continue;
            }
            for va in pa.section.simplex.vertices() {
                if pb.section.simplex.vertices().iter().any(|vb| va.iter().zip(vb).all(|(x, y)| (x - y).abs() < 1e-12)) {
                    corner_conservative = true;
                    break 'outer;
                }
            }
        }
    }
    Ok(ConicLp { lp, basis, origins, corner_conservative })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level {
    pub d: u32,
    pub r: u32,
    pub sweeps: usize,
}

/// `d ∈ {2, 4, 6}`, `r ∈ {0, 1, (d−2)/2}`, 8 sweeps each.
pub fn default_schedule() -> Vec<Level> {
    let mut out = Vec::new();
    for d in [2u32, 4, 6] {
        let mut rs = vec![0, 1, (d - 2) / 2];
        rs.sort_unstable();
        rs.dedup();
        for r in rs {
            out.push(Level { d, r, sweeps: 8 });
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct HierarchyOptions {
    /// Acceptance threshold on the LP margin `t*`.
    pub margin: f64,
    pub lp: LpOptions,
    /// Relative slack under which a row counts as binding.
    pub active_tol: f64,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        HierarchyOptions { margin: 1e-6, lp: LpOptions::default(), active_tol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct ConicCertificate {
    pub candidate: RationalCandidate,
    pub d: u32,
    pub margin: f64,
    pub partitions: Vec<PartitionedSection>,
    pub sweeps: usize,
    pub lp_rows: usize,
    pub lp_pivots: usize,
    pub corner_conservative: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub level: Level,
    /// Best LP margin seen at this level (`None` if no LP was solved to optimality).
    pub best_margin: Option<f64>,
    pub sweeps_run: usize,
}

#[derive(Clone, Debug)]
pub enum HierarchyOutcome {
    Certificate(ConicCertificate),
    Exhausted(Vec<LevelReport>),
}

/// Event passed to the observer after each LP solve.
pub struct LpEvent<'a> {
    pub level: Level,
    pub sweep: usize,
    pub lp: &'a ConicLp,
    pub margin: Option<f64>,
}

pub fn run_hierarchy(system: &ConicSystem, schedule: &[Level], opts: &HierarchyOptions) -> Result<HierarchyOutcome> {
    run_hierarchy_observed(system, schedule, opts, &mut |_| {})
}

pub fn run_hierarchy_observed(
    system: &ConicSystem,
    schedule: &[Level],
    opts: &HierarchyOptions,
    observer: &mut dyn FnMut(&LpEvent<'_>),
) -> Result<HierarchyOutcome> {
    let initial = initial_partitions(system.cone())?;
    if initial.iter().all(|p| p.face.is_some()) {
        return Err(Error::EmptyPartition);
    }
    let mut reports = Vec::new();
    for &level in schedule {
        let mut partitions = initial.clone();
        let mut best: Option<f64> = None;
        let mut sweeps_run = 0;
        for sweep in 0..=level.sweeps {
            sweeps_run = sweep;
            let clp = assemble_lp(system, level.d, level.r, &partitions)?;
            let status = clp.lp.solve_with(&opts.lp)?;
            let solution = match status {
                LpStatus::Optimal(s) => Some(s),
                other => {
                    log::warn!("level d={} r={} sweep {}: LP returned {:?}", level.d, level.r, sweep, status_name(&other));
                    None
                }
            };
            let margin = solution.as_ref().map(|s| s.value);
            observer(&LpEvent { level, sweep, lp: &clp, margin });
            log::info!(
                "level d={} r={} sweep {}: {} rows, margin {}",
                level.d,
                level.r,
                sweep,
                clp.lp.rows.len(),
                margin.map_or_else(|| String::from("n/a"), |m| format!("{m:e}"))
            );
            let Some(sol) = solution else { break };
            best = Some(best.map_or(sol.value, |b: f64| b.max(sol.value)));
            if sol.value >= opts.margin {
                let nb = clp.basis.len();
                let h = FloatPoly::from_terms(
                    system.dim(),
                    clp.basis.iter().cloned().zip(sol.x[..nb].iter().cloned()),
                )?;
                return Ok(HierarchyOutcome::Certificate(ConicCertificate {
                    candidate: RationalCandidate { h, r: level.r },
                    d: level.d,
                    margin: sol.value,
                    partitions,
                    sweeps: sweep,
                    lp_rows: clp.lp.rows.len(),
                    lp_pivots: sol.pivots,
                    corner_conservative: clp.corner_conservative,
                }));
            }
            if sweep == level.sweeps {
                break;
            }
            if !refine_active(&mut partitions, &clp, &sol.x, sol.value, opts.active_tol)? {
                break;
            }
        }
        reports.push(LevelReport { level, best_margin: best, sweeps_run });
    }
    Ok(HierarchyOutcome::Exhausted(reports))
}

fn status_name(s: &LpStatus) -> &'static str {
    match s {
        LpStatus::Optimal(_) => "optimal",
        LpStatus::Infeasible(_) => "infeasible",
        LpStatus::Unbounded { .. } => "unbounded",
        LpStatus::Stalled { .. } => "stalled",
    }
}

/// Bisects every refinable cell with a binding row; if none qualifies, every
/// refinable cell. Returns false when nothing can be refined.
fn refine_active(partitions: &mut [PartitionedSection], clp: &ConicLp, x: &[f64], t: f64, tol: f64) -> Result<bool> {
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); partitions.len()];
    for (row, origin) in clp.lp.rows.iter().zip(&clp.origins) {
        let value: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
        if value.abs() <= tol * (1.0 + t.abs()) && partitions[origin.partition].partition.cells()[origin.cell].num_vertices() >= 2 {
            active[origin.partition].push(origin.cell);
        }
    }
    let any_active = active.iter().any(|a| !a.is_empty());
    let mut refined = false;
    for (pi, ps) in partitions.iter_mut().enumerate() {
        if !ps.partition.refinable() {
            continue;
        }
        if any_active {
            let mut cells = core::mem::take(&mut active[pi]);
            cells.sort_unstable();
            cells.dedup();
            if !cells.is_empty() {
                ps.partition.refine(&cells)?;
                refined = true;
            }
        } else {
            ps.partition.refine_all()?;
            refined = true;
        }
    }
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p(s: &str) -> RatPoly {
        parse_polynomial(s, 2).unwrap()
    }

    #[test]
    fn s0_for_the_linear_contraction() {
        let f = vec![p("-x1"), p("-x2")];
        let basis = Monomial::of_degree(2, 2);
        let s0 = build_s0(&basis, 0, &f);
        // h = x1² + x2²: s₀ = 2‖x‖⁴
        let total = &s0[0] + &s0[2];
        assert_eq!(total, p("2*(x1^2 + x2^2)^2"));
        assert_eq!(total.eval(&[1.0, 0.0]), 2.0);
        assert_eq!(total.degree(), 2 + 1 + 1);
    }

    #[test]
    fn s0_with_rational_weight() {
        // r = 1, h = ‖x‖², f = −x: −‖x‖²⟨2x, −x⟩ + 2‖x‖²⟨x, −x⟩ = 0
        let f = vec![p("-x1"), p("-x2")];
        let basis = Monomial::of_degree(2, 2);
        let s0 = build_s0(&basis, 1, &f);
        assert!((&s0[0] + &s0[2]).is_zero());
    }

    #[test]
    fn branch_a_is_s0() {
        let f = vec![p("-x1 - 2*x2"), p("-x1 - x2")];
        let k = PolyhedralCone::new(2, vec![vec![-0.25, 1.0], vec![1.0, -0.25]]).unwrap();
        let fb = face_eta_polynomial(&k, 0, &f).unwrap();
        let basis = Monomial::of_degree(2, 2);
        assert_eq!(build_si(&basis, 0, &f, &fb, Branch::A), build_s0(&basis, 0, &f));
    }

    #[test]
    fn tuple_count_for_one_cell() {
        let sys = ConicSystem::new(vec![p("-x1"), p("-x2")], PolyhedralCone::nonnegative_orthant(2)).unwrap();
        let parts = initial_partitions(sys.cone()).unwrap();
        let clp = assemble_lp(&sys, 2, 0, &parts).unwrap();
        let pos = clp.origins.iter().filter(|o| o.kind == RowKind::Positivity).count();
        assert_eq!(pos, 3);
        let dec = clp.origins.iter().filter(|o| o.kind == RowKind::Decrease).count();
        assert_eq!(dec, 5);
    }

    #[test]
    fn rejects_bad_fields() {
        let k = PolyhedralCone::nonnegative_orthant(2);
        assert!(matches!(ConicSystem::new(vec![p("-x1 + x2^2"), p("-x2")], k.clone()), Err(Error::NotHomogeneous)));
        assert!(ConicSystem::new(vec![p("-x1"), p("1")], k).is_err());
    }
}
