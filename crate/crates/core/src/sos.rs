//! Sum-of-squares certificates on compact semialgebraic sets.
//!
//! A polynomial `V` without constant term is searched for together with
//! Putinar-type decompositions of three conditions:
//!
//! 1. `V − ε_pd‖x‖² = σ₀ + Σ σ_i g_i`
//! 2. `−⟨∇V, f⟩ − m(x) = χ₀ + Σ χ_i g_i`
//! 3. for every `j`: `−⟨∇V, ∇g_j⟩ = χ_{j,0} + Σ_{i≠j} χ_{j,i} g_i + φ_j g_j`
//!
//! with `σ`, `χ` sums of squares (Gram matrices) and `φ_j` free. All
//! conditions share the coefficients of `V` and are stacked into one block
//! SDP, or into an LP when the Gram matrices are restricted to diagonally
//! dominant ones.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::linprog::{LinearProgram, LpOptions, LpStatus, Relation, Sense};
use crate::poly::{dot as poly_dot, FloatPoly, Monomial, RatPoly, Rational};
use crate::sdp::{min_eigenvalue, SdpConstraint, SdpOptions, SdpStatus, SemidefiniteProgram};
use crate::tangency::SemialgebraicSet;
use crate::{Error, Result};

/// `ẋ = f(x) − N_S(x)` on a compact `S`.
#[derive(Clone, Debug)]
pub struct SemialgebraicSystem {
    f: Vec<RatPoly>,
    set: SemialgebraicSet,
}

impl SemialgebraicSystem {
    pub fn new(f: Vec<RatPoly>, set: SemialgebraicSet) -> Result<Self> {
        let n = set.dim();
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.len() });
        }
        if let Some(p) = f.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
        }
        let origin = vec![0.0; n];
        if f.iter().any(|p| p.eval(&origin) != 0.0) {
            return Err(Error::Invalid("f(0) must vanish".into()));
        }
        Ok(SemialgebraicSystem { f, set })
    }

    /// Adds the redundant generator `R² − ‖x‖²` with `R` the bounding box
    /// radius, making the quadratic module Archimedean.
    pub fn with_ball_generator(self) -> Result<Self> {
        let n = self.set.dim();
        let r2: f64 = self.set.bbox().iter().map(|&(lo, hi)| (lo * lo).max(hi * hi)).sum();
        let ball = &RatPoly::constant(n, crate::poly::rational_from_f64(r2)) - &RatPoly::norm_squared(n);
        let mut gens = self.set.generators().to_vec();
        gens.push(ball);
        let set = SemialgebraicSet::new(n, gens, self.set.bbox().to_vec())?;
        Ok(SemialgebraicSystem { f: self.f, set })
    }

    pub fn f(&self) -> &[RatPoly] {
        &self.f
    }

    pub fn set(&self) -> &SemialgebraicSet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn eval_f(&self, x: &[f64]) -> Vec<f64> {
        self.f.iter().map(|p| p.eval(x)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    /// Diagonally dominant Gram matrices, solved as an LP.
    Dsos,
    Sdp,
}

/// Right-hand margin `m(x)` subtracted in the decrease condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecreaseMargin {
    /// `m ≡ 0`; strict decrease is left to sampling.
    None,
    /// `ε‖x‖^{2q}`
    Power { eps: f64, q: u32 },
}

impl DecreaseMargin {
    fn polynomial(&self, n: usize) -> RatPoly {
        match *self {
            DecreaseMargin::None => RatPoly::zero(n),
            DecreaseMargin::Power { eps, q } => RatPoly::norm_squared(n).pow(q).scale(&crate::poly::rational_from_f64(eps)),
        }
    }

    fn degree(&self) -> u32 {
        match *self {
            DecreaseMargin::None => 0,
            DecreaseMargin::Power { q, .. } => 2 * q,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SosOptions {
    pub eps_pd: f64,
    pub margin: DecreaseMargin,
    /// Smallest accepted Gram shift `t`.
    pub accept: f64,
    pub residual_tol: f64,
    pub eigen_tol: f64,
    /// Retry with every degree budget raised by 2 before giving up.
    pub retry_slack: bool,
    pub sdp: SdpOptions,
    pub lp: LpOptions,
}

impl Default for SosOptions {
    fn default() -> Self {
        SosOptions {
            eps_pd: 1e-3,
            margin: DecreaseMargin::None,
            accept: -1e-8,
            residual_tol: 1e-6,
            eigen_tol: 1e-7,
            retry_slack: true,
            sdp: SdpOptions::default(),
            lp: LpOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    PositiveDefinite,
    Decrease,
    /// boundary condition for generator `j` (zero-based)
    Boundary(usize),
}

#[derive(Clone, Debug)]
pub struct Condition {
    pub kind: ConditionKind,
    /// Degree budget of every product on the right-hand side.
    pub budget: u32,
}

/// A Gram block `σ = bᵀGb`; `multiplier` is the generator index it
/// multiplies, `None` for the free-standing term.
#[derive(Clone, Debug)]
pub struct GramBlock {
    pub condition: usize,
    pub multiplier: Option<usize>,
    pub basis: Vec<Monomial>,
}

/// Free polynomial `φ_j` of a boundary condition.
#[derive(Clone, Debug)]
pub struct FreeMultiplier {
    pub condition: usize,
    pub generator: usize,
    pub basis: Vec<Monomial>,
    /// index of its first coefficient in [`SosAssignment::phi`]
    pub offset: usize,
}

/// One coefficient-matching equation:
/// `Σ v·V_a − Σ c·(b_p b_q g)-coefficient·G_pq − Σ φ-terms = rhs`.
#[derive(Clone, Debug)]
struct Equation {
    v: Vec<(usize, f64)>,
    phi: Vec<(usize, f64)>,
    /// `(block, p, q, c)` with `p ≤ q` and `c` the coefficient of the
    /// monomial in `b_p b_q g`
    gram: Vec<(usize, usize, usize, f64)>,
    rhs: f64,
}

/// A point of the assembled system.
#[derive(Clone, Debug, PartialEq)]
pub struct SosAssignment {
    pub v: Vec<f64>,
    pub grams: Vec<DMatrix<f64>>,
    pub phi: Vec<f64>,
}

/// All monomials of degree `≤ k`, the basis of a Gram matrix for a
/// polynomial of degree `2k` (only degree `k` when `homogeneous`).
pub fn gram_basis(n: usize, k: u32, homogeneous: bool) -> Vec<Monomial> {
    if homogeneous {
        Monomial::of_degree(n, k)
    } else {
        Monomial::degree_range(n, 0, k)
    }
}

/// `bᵀ G b`.
pub fn gram_polynomial(basis: &[Monomial], g: &DMatrix<f64>) -> FloatPoly {
    let n = basis.first().map_or(0, Monomial::nvars);
    let mut out = FloatPoly::zero(n);
    for p in 0..basis.len() {
        for q in 0..basis.len() {
            if g[(p, q)] != 0.0 {
                out = &out + &FloatPoly::monomial(basis[p].mul(&basis[q]), g[(p, q)]);
            }
        }
    }
    out
}

/// For each monomial of `bᵀGb`, the `(p, q)` pairs with `p ≤ q` whose product
/// `b_p b_q` equals it. The coefficient is `Σ G_pp + 2 Σ_{p<q} G_pq`.
pub fn gram_coefficient_map(basis: &[Monomial]) -> BTreeMap<Monomial, Vec<(usize, usize)>> {
    let mut out: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
    for p in 0..basis.len() {
        for q in p..basis.len() {
            out.entry(basis[p].mul(&basis[q])).or_default().push((p, q));
        }
    }
    out
}

fn ceil_even(d: u32) -> u32 {
    d + d % 2
}

fn floor_even(d: u32) -> u32 {
    d - d % 2
}

fn to_f64(c: &Rational) -> f64 {
    crate::poly::Coeff::to_f64(c)
}

/// The stacked system for one degree of `V`.
#[derive(Clone, Debug)]
pub struct SosProgram {
    n: usize,
    pub deg_v: u32,
    pub slack: u32,
    pub eps_pd: f64,
    pub margin: DecreaseMargin,
    pub v_basis: Vec<Monomial>,
    pub conditions: Vec<Condition>,
    pub blocks: Vec<GramBlock>,
    pub free: Vec<FreeMultiplier>,
    num_phi: usize,
    equations: Vec<Equation>,
    /// LHS polynomials per condition and `V` basis element, plus constants,
    /// kept for the independent residual check
    lhs_v: Vec<Vec<RatPoly>>,
    lhs_const: Vec<RatPoly>,
    generators: Vec<RatPoly>,
}

impl SosProgram {
    pub fn assemble(system: &SemialgebraicSystem, deg_v: u32, opts: &SosOptions, slack: u32) -> Result<Self> {
        if deg_v < 2 || deg_v % 2 != 0 {
            return Err(Error::Invalid(format!("degree of V must be even and at least 2, got {deg_v}")));
        }
        let n = system.dim();
        let gens = system.set().generators().to_vec();
        let gdeg: Vec<u32> = gens.iter().map(RatPoly::degree).collect();
        let fdeg = system.f().iter().map(RatPoly::degree).max().unwrap_or(0);
        let v_basis = Monomial::degree_range(n, 1, deg_v);
        let v_polys: Vec<RatPoly> = v_basis.iter().map(|m| RatPoly::monomial(m.clone(), Rational::from_integer(1.into()))).collect();

        let mut conditions = Vec::new();
        let mut lhs_v = Vec::new();
        let mut lhs_const = Vec::new();

        conditions.push(Condition { kind: ConditionKind::PositiveDefinite, budget: deg_v + slack });
        lhs_v.push(v_polys.clone());
        lhs_const.push(RatPoly::norm_squared(n).scale(&-crate::poly::rational_from_f64(opts.eps_pd)));

        let lhs_deg = (deg_v - 1 + fdeg).max(opts.margin.degree());
        conditions.push(Condition { kind: ConditionKind::Decrease, budget: ceil_even(lhs_deg) + slack });
        lhs_v.push(v_polys.iter().map(|v| -&poly_dot(&v.gradient(), system.f())).collect());
        lhs_const.push(-&opts.margin.polynomial(n));

        for (j, g) in gens.iter().enumerate() {
            let lhs_deg = (deg_v + gdeg[j]).saturating_sub(2).max(gdeg[j]);
            conditions.push(Condition { kind: ConditionKind::Boundary(j), budget: ceil_even(lhs_deg) + slack });
            let grad_g = g.gradient();
            lhs_v.push(v_polys.iter().map(|v| -&poly_dot(&v.gradient(), &grad_g)).collect());
            lhs_const.push(RatPoly::zero(n));
        }

        let mut blocks = Vec::new();
        let mut free = Vec::new();
        let mut num_phi = 0;
        for (ci, cond) in conditions.iter().enumerate() {
            let b = cond.budget;
            blocks.push(GramBlock { condition: ci, multiplier: None, basis: gram_basis(n, b / 2, false) });
            for (i, &d) in gdeg.iter().enumerate() {
                if d > b {
                    return Err(Error::DegreeSchedule { index: i, generator_degree: d, budget: b });
                }
                if cond.kind == ConditionKind::Boundary(i) {
                    let basis = Monomial::degree_range(n, 0, b - d);
                    let len = basis.len();
                    free.push(FreeMultiplier { condition: ci, generator: i, basis, offset: num_phi });
                    num_phi += len;
                } else {
                    blocks.push(GramBlock { condition: ci, multiplier: Some(i), basis: gram_basis(n, floor_even(b - d) / 2, false) });
                }
            }
        }

        let mut rows: Vec<BTreeMap<Monomial, Equation>> = vec![BTreeMap::new(); conditions.len()];
        let blank = || Equation { v: Vec::new(), phi: Vec::new(), gram: Vec::new(), rhs: 0.0 };
        for ci in 0..conditions.len() {
            let eqs = &mut rows[ci];
            for (a, p) in lhs_v[ci].iter().enumerate() {
                for (m, c) in p.terms() {
                    eqs.entry(m.clone()).or_insert_with(blank).v.push((a, to_f64(c)));
                }
            }
            for (m, c) in lhs_const[ci].terms() {
                eqs.entry(m.clone()).or_insert_with(blank).rhs -= to_f64(c);
            }
        }
        let one = RatPoly::constant(n, Rational::from_integer(1.into()));
        for (bi, block) in blocks.iter().enumerate() {
            let g = block.multiplier.map_or(&one, |i| &gens[i]);
            let eqs = &mut rows[block.condition];
            for p in 0..block.basis.len() {
                for q in p..block.basis.len() {
                    let bb = block.basis[p].mul(&block.basis[q]);
                    for (m, c) in g.terms() {
                        let mono = bb.mul(m);
                        eqs.entry(mono).or_insert_with(blank).gram.push((bi, p, q, to_f64(c)));
                    }
                }
            }
        }
        for fm in &free {
            let g = &gens[fm.generator];
            let eqs = &mut rows[fm.condition];
            for (k, b) in fm.basis.iter().enumerate() {
                for (m, c) in g.terms() {
                    eqs.entry(b.mul(m)).or_insert_with(blank).phi.push((fm.offset + k, to_f64(c)));
                }
            }
        }
        let equations = rows.into_iter().flat_map(BTreeMap::into_values).collect();
        Ok(SosProgram {
            n,
            deg_v,
            slack,
            eps_pd: opts.eps_pd,
            margin: opts.margin,
            v_basis,
            conditions,
            blocks,
            free,
            num_phi,
            equations,
            lhs_v,
            lhs_const,
            generators: gens,
        })
    }

    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn num_phi(&self) -> usize {
        self.num_phi
    }

    /// Index of the Gram block of `kind` multiplying generator `multiplier`.
    pub fn block_index(&self, kind: ConditionKind, multiplier: Option<usize>) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| self.conditions[b.condition].kind == kind && b.multiplier == multiplier)
    }

    pub fn free_multiplier(&self, j: usize) -> Option<&FreeMultiplier> {
        self.free.iter().find(|f| f.generator == j)
    }

    /// Zero assignment of the right shape.
    pub fn zero_assignment(&self) -> SosAssignment {
        SosAssignment {
            v: vec![0.0; self.v_basis.len()],
            grams: self.blocks.iter().map(|b| DMatrix::zeros(b.basis.len(), b.basis.len())).collect(),
            phi: vec![0.0; self.num_phi],
        }
    }

    fn total_gram_size(&self) -> usize {
        self.blocks.iter().map(|b| b.basis.len()).sum()
    }

    /// Bound on the summed Gram traces; keeps the shift `t` bounded.
    fn trace_bound(&self) -> f64 {
        self.total_gram_size() as f64
    }

    /// Largest violation of the coefficient-matching equations.
    pub fn equation_residual(&self, a: &SosAssignment) -> f64 {
        self.equations
            .iter()
            .map(|e| {
                let mut lhs: f64 = e.v.iter().map(|&(k, c)| c * a.v[k]).sum();
                lhs -= e.phi.iter().map(|&(k, c)| c * a.phi[k]).sum::<f64>();
                for &(b, p, q, c) in &e.gram {
                    let g = &a.grams[b];
                    lhs -= if p == q { c * g[(p, q)] } else { c * (g[(p, q)] + g[(q, p)]) };
                }
                (lhs - e.rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Per-condition residual obtained by expanding both sides as polynomials
    /// (independent of the equation rows).
    pub fn condition_residuals(&self, a: &SosAssignment) -> Vec<f64> {
        self.conditions
            .iter()
            .enumerate()
            .map(|(ci, _)| {
                let mut diff = self.lhs_const[ci].to_f64();
                for (k, p) in self.lhs_v[ci].iter().enumerate() {
                    diff = &diff + &p.to_f64().scale(&a.v[k]);
                }
                for (bi, block) in self.blocks.iter().enumerate().filter(|(_, b)| b.condition == ci) {
                    let sigma = gram_polynomial(&block.basis, &a.grams[bi]);
                    let prod = match block.multiplier {
                        Some(i) => &sigma * &self.generators[i].to_f64(),
                        None => sigma,
                    };
                    diff = &diff - &prod;
                }
                for fm in self.free.iter().filter(|f| f.condition == ci) {
                    let phi = self.phi_polynomial(fm, &a.phi);
                    diff = &diff - &(&phi * &self.generators[fm.generator].to_f64());
                }
                diff.max_abs_coeff()
            })
            .collect()
    }

    pub fn v_polynomial(&self, v: &[f64]) -> FloatPoly {
        FloatPoly::from_terms(self.n, self.v_basis.iter().cloned().zip(v.iter().cloned())).expect("basis dimension")
    }

    pub fn phi_polynomial(&self, fm: &FreeMultiplier, phi: &[f64]) -> FloatPoly {
        FloatPoly::from_terms(self.n, fm.basis.iter().cloned().zip(phi[fm.offset..fm.offset + fm.basis.len()].iter().cloned()))
            .expect("basis dimension")
    }

    /// The block SDP: Gram `G_k = X_k + t·I`, free variables `(V, φ, t)`,
    /// `max t`, and `Σ tr G_k + s = trace bound` with a 1×1 slack block `s`.
    pub fn to_sdp(&self) -> SemidefiniteProgram {
        let nv = self.v_basis.len();
        let t_index = nv + self.num_phi;
        let mut sizes: Vec<usize> = self.blocks.iter().map(|b| b.basis.len()).collect();
        sizes.push(1);
        let slack_block = sizes.len() - 1;
        let mut sdp = SemidefiniteProgram::new(sizes, t_index + 1);
        sdp.free_objective[t_index] = -1.0;
        for e in &self.equations {
            let mut row = SdpConstraint::new(e.rhs);
            for &(k, c) in &e.v {
                row.add_free(k, c);
            }
            for &(k, c) in &e.phi {
                row.add_free(nv + k, -c);
            }
            let mut t_coeff = 0.0;
            for &(b, p, q, c) in &e.gram {
                row.add(b, p, q, -c);
                if p == q {
                    t_coeff -= c;
                }
            }
            if t_coeff != 0.0 {
                row.add_free(t_index, t_coeff);
            }
            sdp.constraints.push(row);
        }
        let mut trace = SdpConstraint::new(self.trace_bound());
        for (b, block) in self.blocks.iter().enumerate() {
            for p in 0..block.basis.len() {
                trace.add(b, p, p, 1.0);
            }
        }
        trace.add_free(t_index, self.total_gram_size() as f64);
        trace.add(slack_block, 0, 0, 1.0);
        sdp.constraints.push(trace);
        sdp
    }

    /// Maps an assignment to SDP variables with `t = 0`.
    pub fn sdp_point(&self, a: &SosAssignment) -> (Vec<DMatrix<f64>>, Vec<f64>) {
        let mut x = a.grams.clone();
        let total: f64 = a.grams.iter().map(|g| g.trace()).sum();
        x.push(DMatrix::from_element(1, 1, self.trace_bound() - total));
        let mut u = a.v.clone();
        u.extend_from_slice(&a.phi);
        u.push(0.0);
        (x, u)
    }

    fn assignment_from_sdp(&self, x: &[DMatrix<f64>], u: &[f64]) -> (SosAssignment, f64) {
        let nv = self.v_basis.len();
        let t = u[nv + self.num_phi];
        let grams = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, _)| {
                let mut g = x[b].clone();
                for p in 0..g.nrows() {
                    g[(p, p)] += t;
                }
                g
            })
            .collect();
        (SosAssignment { v: u[..nv].to_vec(), grams, phi: u[nv..nv + self.num_phi].to_vec() }, t)
    }

    /// LP with diagonally dominant Gram matrices: variables `(V, φ, t)`,
    /// then the upper triangle of each Gram, then `u_pq ≥ |G_pq|` for `p < q`.
    pub fn to_dsos_lp(&self) -> LinearProgram {
        let nv = self.v_basis.len();
        let t_index = nv + self.num_phi;
        let mut gram_index: Vec<BTreeMap<(usize, usize), usize>> = Vec::new();
        let mut abs_index: Vec<BTreeMap<(usize, usize), usize>> = Vec::new();
        let mut next = t_index + 1;
        for block in &self.blocks {
            let k = block.basis.len();
            let mut gi = BTreeMap::new();
            for p in 0..k {
                for q in p..k {
                    gi.insert((p, q), next);
                    next += 1;
                }
            }
            gram_index.push(gi);
        }
        for block in &self.blocks {
            let k = block.basis.len();
            let mut ai = BTreeMap::new();
            for p in 0..k {
                for q in p + 1..k {
                    ai.insert((p, q), next);
                    next += 1;
                }
            }
            abs_index.push(ai);
        }
        let nvars = next;
        let mut objective = vec![0.0; nvars];
        objective[t_index] = 1.0;
        let mut lp = LinearProgram::new(Sense::Maximize, objective);
        for ai in &abs_index {
            for &j in ai.values() {
                lp.set_bounds(j, 0.0, f64::INFINITY);
            }
        }
        for e in &self.equations {
            let mut row = vec![0.0; nvars];
            for &(k, c) in &e.v {
                row[k] += c;
            }
            for &(k, c) in &e.phi {
                row[nv + k] -= c;
            }
            for &(b, p, q, c) in &e.gram {
                row[gram_index[b][&(p, q)]] -= if p == q { c } else { 2.0 * c };
            }
            lp.add_row(row, Relation::Eq, e.rhs);
        }
        for (b, block) in self.blocks.iter().enumerate() {
            let k = block.basis.len();
            for p in 0..k {
                let mut row = vec![0.0; nvars];
                row[gram_index[b][&(p, p)]] = 1.0;
                row[t_index] = -1.0;
                for q in 0..k {
                    if q != p {
                        row[abs_index[b][&(p.min(q), p.max(q))]] = -1.0;
                    }
                }
                lp.add_row(row, Relation::Ge, 0.0);
            }
            for (&(p, q), &j) in &abs_index[b] {
                let g = gram_index[b][&(p, q)];
                let mut row = vec![0.0; nvars];
                row[j] = 1.0;
                row[g] = -1.0;
                lp.add_row(row.clone(), Relation::Ge, 0.0);
                row[g] = 1.0;
                lp.add_row(row, Relation::Ge, 0.0);
            }
        }
        let mut trace = vec![0.0; nvars];
        for gi in &gram_index {
            for (&(p, q), &j) in gi {
                if p == q {
                    trace[j] = 1.0;
                }
            }
        }
        lp.add_row(trace, Relation::Le, self.trace_bound());
        lp
    }

    fn assignment_from_lp(&self, x: &[f64]) -> (SosAssignment, f64) {
        let nv = self.v_basis.len();
        let t_index = nv + self.num_phi;
        let mut next = t_index + 1;
        let mut grams = Vec::new();
        for block in &self.blocks {
            let k = block.basis.len();
            let mut g = DMatrix::zeros(k, k);
            for p in 0..k {
                for q in p..k {
                    g[(p, q)] = x[next];
                    g[(q, p)] = x[next];
                    next += 1;
                }
            }
            grams.push(g);
        }
        (SosAssignment { v: x[..nv].to_vec(), grams, phi: x[nv..t_index].to_vec() }, x[t_index])
    }

    /// Runs the solver of `tier` and checks the result.
    pub fn solve(&self, tier: Tier, opts: &SosOptions) -> Result<SosOutcome> {
        let (assignment, t, converged) = match tier {
            Tier::Sdp => match self.to_sdp().solve_with(&opts.sdp)? {
                SdpStatus::Solved(s) => {
                    let (a, t) = self.assignment_from_sdp(&s.x, &s.u);
                    (a, t, true)
                }
                SdpStatus::MaxIter(s) | SdpStatus::Stalled(s) => {
                    let (a, t) = self.assignment_from_sdp(&s.x, &s.u);
                    (a, t, false)
                }
                SdpStatus::Infeasible { .. } => return Ok(SosOutcome::Infeasible { deg_v: self.deg_v, best_t: None }),
            },
            Tier::Dsos => match self.to_dsos_lp().solve_with(&opts.lp)? {
                LpStatus::Optimal(s) => {
                    let (a, t) = self.assignment_from_lp(&s.x);
                    (a, t, true)
                }
                LpStatus::Stalled { .. } => return Ok(SosOutcome::MaxIter { deg_v: self.deg_v, t: None }),
                _ => return Ok(SosOutcome::Infeasible { deg_v: self.deg_v, best_t: None }),
            },
        };
        log::info!("SOS degree {} (slack {}), {:?} tier: t = {:e}", self.deg_v, self.slack, tier, t);
        if t < opts.accept {
            return Ok(if converged {
                SosOutcome::Infeasible { deg_v: self.deg_v, best_t: Some(t) }
            } else {
                SosOutcome::MaxIter { deg_v: self.deg_v, t: Some(t) }
            });
        }
        let residuals = self.condition_residuals(&assignment);
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        if worst > opts.residual_tol {
            if !converged {
                return Ok(SosOutcome::MaxIter { deg_v: self.deg_v, t: Some(t) });
            }
            return Err(Error::UnsoundCertificate { residual: worst, tolerance: opts.residual_tol });
        }
        let min_eigs: Vec<f64> = assignment.grams.iter().map(min_eigenvalue).collect();
        let worst_eig = min_eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if worst_eig < -opts.eigen_tol {
            if !converged {
                return Ok(SosOutcome::MaxIter { deg_v: self.deg_v, t: Some(t) });
            }
            return Err(Error::UnsoundCertificate { residual: -worst_eig, tolerance: opts.eigen_tol });
        }
        Ok(SosOutcome::Certificate(self.certificate(assignment, t, tier, residuals, min_eigs)))
    }

    fn certificate(&self, a: SosAssignment, t: f64, tier: Tier, residuals: Vec<f64>, min_eigs: Vec<f64>) -> SosCertificate {
        let multipliers = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, block)| Multiplier {
                label: block_label(self.conditions[block.condition].kind, block.multiplier),
                basis: block.basis.clone(),
                gram: a.grams[b].clone(),
                polynomial: gram_polynomial(&block.basis, &a.grams[b]),
                min_eigenvalue: min_eigs[b],
            })
            .collect();
        let free = self
            .free
            .iter()
            .map(|fm| (format!("phi[{}]", fm.generator + 1), self.phi_polynomial(fm, &a.phi)))
            .collect();
        SosCertificate {
            v: self.v_polynomial(&a.v),
            deg_v: self.deg_v,
            slack: self.slack,
            tier,
            t,
            eps_pd: self.eps_pd,
            margin: self.margin,
            weak_decrease: self.margin == DecreaseMargin::None,
            multipliers,
            free,
            residuals: self
                .conditions
                .iter()
                .zip(residuals)
                .map(|(c, r)| (condition_label(c.kind), r))
                .collect(),
            assignment: a,
        }
    }
}

pub fn condition_label(kind: ConditionKind) -> String {
    match kind {
        ConditionKind::PositiveDefinite => "positivity".into(),
        ConditionKind::Decrease => "decrease".into(),
        ConditionKind::Boundary(j) => format!("boundary[{}]", j + 1),
    }
}

/// `sigma0`, `sigma[i]`, `chi0`, `chi[i]`, `chi[j,0]`, `chi[j,i]` (one-based).
pub fn block_label(kind: ConditionKind, multiplier: Option<usize>) -> String {
    match (kind, multiplier) {
        (ConditionKind::PositiveDefinite, None) => "sigma0".into(),
        (ConditionKind::PositiveDefinite, Some(i)) => format!("sigma[{}]", i + 1),
        (ConditionKind::Decrease, None) => "chi0".into(),
        (ConditionKind::Decrease, Some(i)) => format!("chi[{}]", i + 1),
        (ConditionKind::Boundary(j), None) => format!("chi[{},0]", j + 1),
        (ConditionKind::Boundary(j), Some(i)) => format!("chi[{},{}]", j + 1, i + 1),
    }
}

#[derive(Clone, Debug)]
pub struct Multiplier {
    pub label: String,
    pub basis: Vec<Monomial>,
    pub gram: DMatrix<f64>,
    pub polynomial: FloatPoly,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct SosCertificate {
    pub v: FloatPoly,
    pub deg_v: u32,
    /// extra degree used beyond the default budgets
    pub slack: u32,
    pub tier: Tier,
    /// optimal Gram shift
    pub t: f64,
    pub eps_pd: f64,
    pub margin: DecreaseMargin,
    /// `m ≡ 0`: strict decrease has to be confirmed by sampling
    pub weak_decrease: bool,
    pub multipliers: Vec<Multiplier>,
    pub free: Vec<(String, FloatPoly)>,
    pub residuals: Vec<(String, f64)>,
    pub assignment: SosAssignment,
}

impl SosCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.multipliers.iter().map(|m| m.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub enum SosOutcome {
    Certificate(SosCertificate),
    /// The best Gram shift is below the acceptance threshold (or the solver
    /// reported infeasibility).
    Infeasible { deg_v: u32, best_t: Option<f64> },
    MaxIter { deg_v: u32, t: Option<f64> },
}

/// Assembles and solves at `deg_v`, retrying once with all budgets raised by 2.
pub fn solve_certificate(system: &SemialgebraicSystem, deg_v: u32, tier: Tier, opts: &SosOptions) -> Result<SosOutcome> {
    let first = SosProgram::assemble(system, deg_v, opts, 0)?.solve(tier, opts)?;
    if !opts.retry_slack || matches!(first, SosOutcome::Certificate(_)) {
        return Ok(first);
    }
    log::info!("degree {deg_v}: retrying with raised multiplier degrees");
    let second = SosProgram::assemble(system, deg_v, opts, 2)?.solve(tier, opts)?;
    Ok(match (&first, second) {
        (_, SosOutcome::Certificate(c)) => SosOutcome::Certificate(c),
        (SosOutcome::MaxIter { .. }, _) => first,
        (_, second) => second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p(s: &str) -> RatPoly {
        parse_polynomial(s, 2).unwrap()
    }

    fn unit_box(f: [&str; 2]) -> SemialgebraicSystem {
        let set = SemialgebraicSet::new(2, vec![p("1 - x1^2"), p("1 - x2^2")], vec![(-1.0, 1.0); 2]).unwrap();
        SemialgebraicSystem::new(vec![p(f[0]), p(f[1])], set).unwrap()
    }

    #[test]
    fn gram_of_difference() {
        let basis = gram_basis(2, 1, true);
        let g = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let q = gram_polynomial(&basis, &g);
        assert_eq!(q, parse_polynomial("(x1 - x2)^2", 2).unwrap().to_f64());
    }

    #[test]
    fn degree_budgets() {
        let sys = unit_box(["-x1", "-x2"]);
        let prog = SosProgram::assemble(&sys, 2, &SosOptions::default(), 0).unwrap();
        assert_eq!(prog.conditions.len(), 4);
        assert!(prog.conditions.iter().all(|c| c.budget == 2));
        let b = prog.block_index(ConditionKind::PositiveDefinite, Some(0)).unwrap();
        assert_eq!(prog.blocks[b].basis.len(), 1);
        assert_eq!(prog.free_multiplier(1).unwrap().basis.len(), 1);
    }

    #[test]
    fn generator_degree_above_budget() {
        let set = SemialgebraicSet::new(2, vec![p("1 - x1^4 - x2^4")], vec![(-1.0, 1.0); 2]).unwrap();
        let sys = SemialgebraicSystem::new(vec![p("-x1"), p("-x2")], set).unwrap();
        assert!(matches!(
            SosProgram::assemble(&sys, 2, &SosOptions::default(), 0),
            Err(Error::DegreeSchedule { index: 0, generator_degree: 4, budget: 2 })
        ));
    }

    #[test]
    fn contraction_on_the_box() {
        let sys = unit_box(["-x1", "-x2"]);
        let out = solve_certificate(&sys, 2, Tier::Sdp, &SosOptions::default()).unwrap();
        let SosOutcome::Certificate(c) = out else { panic!("{out:?}") };
        assert!(c.max_residual() < 1e-6);
        assert!(c.min_gram_eigenvalue() > -1e-7);
        assert!(c.v.eval(&[0.5, -0.5]) > 0.0);
    }

    #[test]
    fn contraction_on_the_box_dsos() {
        let sys = unit_box(["-x1", "-x2"]);
        let out = solve_certificate(&sys, 2, Tier::Dsos, &SosOptions::default()).unwrap();
        assert!(matches!(out, SosOutcome::Certificate(_)), "{out:?}");
    }

    #[test]
    fn expansion_is_infeasible() {
        let sys = unit_box(["x1", "x2"]);
        let out = solve_certificate(&sys, 2, Tier::Sdp, &SosOptions::default()).unwrap();
        assert!(matches!(out, SosOutcome::Infeasible { .. }), "{out:?}");
    }
}
