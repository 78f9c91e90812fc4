//! Dense two-phase primal simplex.
//!
//! The solver works on a dictionary `x_B = β − T·x_N` that only stores the
//! nonbasic columns, so tall problems (many rows, few variables) stay cheap.
//! Each row starts with its own basic variable: a slack for `≤` rows (after
//! sign normalisation) and an artificial otherwise. Pricing is Dantzig's
//! most-negative reduced cost, switching to Bland's smallest-index rule after a
//! run of degenerate pivots; ratio-test ties always go to the smallest variable
//! index. The whole procedure is deterministic.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;


use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `optimise cᵀx` subject to `rows[i]·x (rel) rhs[i]` and `lo ≤ x ≤ hi`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    pub feasibility_tol: f64,
    pub pivot_tol: f64,
    pub optimality_tol: f64,
    pub max_pivots: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_run: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tol: 1e-8,
            pivot_tol: 1e-10,
            optimality_tol: 1e-10,
            max_pivots: 1_000_000,
            degenerate_run: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Dual value of each original row, in the sign convention of the
    /// minimisation form (`y_i ≥ 0` for binding `≥` rows).
    pub row_duals: Vec<f64>,
    /// Dual objective of the internal standard form, in the original sense.
    pub dual_value: f64,
    /// Largest negative reduced cost of a column allowed to enter (≈ 0 at an optimum).
    pub dual_infeasibility: f64,
    pub max_violation: f64,
    pub pivots: usize,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.value - self.dual_value).abs()
    }
}

/// Infeasibility proof for the internal standard form `A·z = b, z ≥ 0`
/// (rows sign-normalised so `b ≥ 0`): `Aᵀy ≤ 0` and `bᵀy > 0`.
#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub y: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl FarkasCertificate {
    /// `(max_j (Aᵀy)_j, bᵀy)`; a valid certificate has the first ≤ tol and the second > tol.
    pub fn check(&self) -> (f64, f64) {
        let ncols = self.a.first().map_or(0, Vec::len);
        let mut worst = f64::NEG_INFINITY;
        for j in 0..ncols {
            let v: f64 = self.a.iter().zip(&self.y).map(|(row, yi)| row[j] * yi).sum();
            worst = worst.max(v);
        }
        let by: f64 = self.b.iter().zip(&self.y).map(|(b, y)| b * y).sum();
        (worst, by)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let (worst, by) = self.check();
        worst <= tol && by > tol
    }
}

#[derive(Clone, Debug)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    /// A feasible point and a direction along which the objective improves without bound.
    Unbounded { point: Vec<f64>, ray: Vec<f64> },
    Stalled { pivots: usize },
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = lo + z`
    Shift(usize, f64),
    /// `x = hi − z`
    Mirror(usize, f64),
    /// `x = z⁺ − z⁻`
    Split(usize, usize),
}

struct Dictionary {
    m: usize,
    ncols: usize,
    /// row-major `m × ncols`
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    nonbasis: Vec<usize>,
    d: Vec<f64>,
    z0: f64,
}

impl Dictionary {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.ncols + j]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let nc = self.ncols;
        let p = self.at(r, e);
        let inv = 1.0 / p;
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[e] = inv;
        }
        self.beta[r] *= inv;
        let pivot_row: Vec<f64> = self.t[r * nc..(r + 1) * nc].to_vec();
        let beta_r = self.beta[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            row[e] = -f * inv;
            self.beta[i] -= f * beta_r;
        }
        let de = self.d[e];
        if de != 0.0 {
            for (dk, pr) in self.d.iter_mut().zip(&pivot_row) {
                *dk -= de * pr;
            }
            self.d[e] = -de * inv;
            self.z0 += de * beta_r;
        }
        core::mem::swap(&mut self.basis[r], &mut self.nonbasis[e]);
    }

    /// Rebuilds reduced costs for the cost vector `cost` (indexed by variable id).
    fn price(&mut self, cost: &[f64]) {
        self.z0 = (0..self.m).map(|i| cost[self.basis[i]] * self.beta[i]).sum();
        for j in 0..self.ncols {
            let mut dj = cost[self.nonbasis[j]];
            for i in 0..self.m {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    dj -= cb * self.at(i, j);
                }
            }
            self.d[j] = dj;
        }
    }
}

enum Phase {
    Optimal,
    Unbounded(usize),
    Stalled,
}

struct Standard {
    /// structural columns (transformed variables plus surplus columns), row-major
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    constant: f64,
    /// per row: true when its row variable is an artificial
    artificial: Vec<bool>,
    /// `+1` or `−1` applied to each row during normalisation
    flip: Vec<f64>,
    maps: Vec<VarMap>,
    n_orig_rows: usize,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, row: Vec<f64>, rel: Relation, rhs: f64) {
        self.rows.push(row);
        self.relations.push(rel);
        self.rhs.push(rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.bounds[j] = (lo, hi);
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.relations.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(Error::Invalid("row, relation and rhs counts differ".into()));
        }
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.bounds.len() });
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        let finite = self.objective.iter().chain(self.rhs.iter()).chain(self.rows.iter().flatten());
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite LP data".into()));
        }
        if self.bounds.iter().any(|&(lo, hi)| lo > hi || lo.is_nan() || hi.is_nan()) {
            return Err(Error::Invalid("empty variable bound interval".into()));
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((row, rel), &b) in self.rows.iter().zip(&self.relations).zip(&self.rhs) {
            let ax: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match rel {
                Relation::Le => ax - b,
                Relation::Ge => b - ax,
                Relation::Eq => (ax - b).abs(),
            };
            worst = worst.max(v);
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn standardise(&self) -> Standard {
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut maps = Vec::with_capacity(self.num_vars());
        let mut ncols = 0;
        // rows `z_k ≤ width`
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for &(lo, hi) in &self.bounds {
            if lo < 0.0 && hi > 0.0 && (lo.is_finite() || hi.is_finite()) {
                // Straddling zero: x = p − q with p ≤ hi, q ≤ −lo keeps the
                // origin feasible. Shifting would give every homogeneous row
                // an artificial.
                maps.push(VarMap::Split(ncols, ncols + 1));
                if hi.is_finite() {
                    bound_rows.push((ncols, hi));
                }
                if lo.is_finite() {
                    bound_rows.push((ncols + 1, -lo));
                }
                ncols += 2;
            } else if lo.is_finite() {
                maps.push(VarMap::Shift(ncols, lo));
                if hi.is_finite() {
                    bound_rows.push((ncols, hi - lo));
                }
                ncols += 1;
            } else if hi.is_finite() {
                maps.push(VarMap::Mirror(ncols, hi));
                ncols += 1;
            } else {
                maps.push(VarMap::Split(ncols, ncols + 1));
                ncols += 2;
            }
        }
        let mut cost = vec![0.0; ncols];
        let mut constant = 0.0;
        for (j, map) in maps.iter().enumerate() {
            let c = sign * self.objective[j];
            match *map {
                VarMap::Shift(k, lo) => {
                    cost[k] += c;
                    constant += c * lo;
                }
                VarMap::Mirror(k, hi) => {
                    cost[k] -= c;
                    constant += c * hi;
                }
                VarMap::Split(p, q) => {
                    cost[p] += c;
                    cost[q] -= c;
                }
            }
        }
        let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
        for ((row, &rel), &b) in self.rows.iter().zip(&self.relations).zip(&self.rhs) {
            let mut t = vec![0.0; ncols];
            let mut rhs = b;
            for (j, map) in maps.iter().enumerate() {
                let a = row[j];
                if a == 0.0 {
                    continue;
                }
                match *map {
                    VarMap::Shift(k, lo) => {
                        t[k] += a;
                        rhs -= a * lo;
                    }
                    VarMap::Mirror(k, hi) => {
                        t[k] -= a;
                        rhs -= a * hi;
                    }
                    VarMap::Split(p, q) => {
                        t[p] += a;
                        t[q] -= a;
                    }
                }
            }
            rows.push((t, rel, rhs));
        }
        let n_orig_rows = rows.len();
        for &(k, width) in &bound_rows {
            let mut t = vec![0.0; ncols];
            t[k] = 1.0;
            rows.push((t, Relation::Le, width));
        }
        // Sign-normalise: b ≥ 0, and ≤ rows with b ≥ 0 keep a slack basis.
        let mut flip = Vec::with_capacity(rows.len());
        for (t, rel, b) in rows.iter_mut() {
            let must_flip = *b < 0.0 || (*b == 0.0 && *rel == Relation::Ge);
            if must_flip {
                for v in t.iter_mut() {
                    *v = -*v;
                }
                *b = -*b;
                *rel = match *rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                flip.push(-1.0);
            } else {
                flip.push(1.0);
            }
        }
        // Surplus columns for ≥ rows; these rows get an artificial.
        let n_surplus = rows.iter().filter(|r| r.1 == Relation::Ge).count();
        let total = ncols + n_surplus;
        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        let mut artificial = Vec::with_capacity(rows.len());
        let mut next = ncols;
        for (t, rel, rhs) in rows {
            let mut full = t;
            full.resize(total, 0.0);
            match rel {
                Relation::Ge => {
                    full[next] = -1.0;
                    next += 1;
                    artificial.push(true);
                }
                Relation::Eq => artificial.push(true),
                Relation::Le => artificial.push(false),
            }
            a.push(full);
            b.push(rhs);
        }
        cost.resize(total, 0.0);
        Standard { a, b, cost, constant, artificial, flip, maps, n_orig_rows }
    }

    pub fn solve(&self) -> Result<LpStatus> {
        self.solve_with(&LpOptions::default())
    }

    pub fn solve_with(&self, opts: &LpOptions) -> Result<LpStatus> {
        self.validate()?;
        let sf = self.standardise();
        let m = sf.a.len();
        let ns = sf.cost.len();
        // variable ids: 0..ns structural, ns..ns+m row variables
        let mut dict = Dictionary {
            m,
            ncols: ns,
            t: sf.a.iter().flatten().cloned().collect(),
            beta: sf.b.clone(),
            basis: (ns..ns + m).collect(),
            nonbasis: (0..ns).collect(),
            d: vec![0.0; ns],
            z0: 0.0,
        };
        let mut pivots = 0usize;
        let is_art = |v: usize| v >= ns && sf.artificial[v - ns];

        if sf.artificial.iter().any(|&a| a) {
            let mut cost1 = vec![0.0; ns + m];
            for i in 0..m {
                if sf.artificial[i] {
                    cost1[ns + i] = 1.0;
                }
            }
            dict.price(&cost1);
            match run_phase(&mut dict, opts, &mut pivots, |_| true) {
                Phase::Stalled => return Ok(LpStatus::Stalled { pivots }),
                Phase::Unbounded(_) => {
                    return Err(Error::Invalid("phase one cannot be unbounded".into()));
                }
                Phase::Optimal => {}
            }
            let scale = 1.0 + sf.b.iter().fold(0.0f64, |a, &b| a.max(b));
            if dict.z0 > opts.feasibility_tol * scale {
                let y: Vec<f64> = (0..m)
                    .map(|i| {
                        let v = ns + i;
                        let rc = dict.nonbasis.iter().position(|&k| k == v).map_or(0.0, |j| dict.d[j]);
                        cost1[v] - rc
                    })
                    .collect();
                let mut a = sf.a.clone();
                // slack columns of ≤ rows are part of the standard form
                for i in 0..m {
                    for (k, row) in a.iter_mut().enumerate() {
                        row.push(if !sf.artificial[i] && k == i { 1.0 } else { 0.0 });
                    }
                }
                return Ok(LpStatus::Infeasible(FarkasCertificate { y, a, b: sf.b.clone() }));
            }
            // Drive zero-level artificials out of the basis where possible.
            for r in 0..m {
                if !is_art(dict.basis[r]) {
                    continue;
                }
                let mut best: Option<usize> = None;
                for j in 0..dict.ncols {
                    if is_art(dict.nonbasis[j]) {
                        continue;
                    }
                    let v = dict.at(r, j).abs();
                    if v > opts.pivot_tol && best.is_none_or(|b| v > dict.at(r, b).abs()) {
                        best = Some(j);
                    }
                }
                if let Some(e) = best {
                    dict.pivot(r, e);
                    pivots += 1;
                }
            }
        }

        let mut cost2 = sf.cost.clone();
        cost2.resize(ns + m, 0.0);
        dict.price(&cost2);
        match run_phase(&mut dict, opts, &mut pivots, |v| !is_art(v)) {
            Phase::Stalled => Ok(LpStatus::Stalled { pivots }),
            Phase::Unbounded(e) => {
                let mut z = vec![0.0; ns + m];
                let mut dz = vec![0.0; ns + m];
                for i in 0..m {
                    z[dict.basis[i]] = dict.beta[i].max(0.0);
                    dz[dict.basis[i]] = -dict.at(i, e);
                }
                dz[dict.nonbasis[e]] = 1.0;
                let point = self.recover(&sf.maps, &z, false);
                let ray = self.recover(&sf.maps, &dz, true);
                Ok(LpStatus::Unbounded { point, ray })
            }
            Phase::Optimal => {
                let mut z = vec![0.0; ns + m];
                for i in 0..m {
                    z[dict.basis[i]] = dict.beta[i].max(0.0);
                }
                let x = self.recover(&sf.maps, &z, false);
                let y: Vec<f64> = (0..m)
                    .map(|i| {
                        let v = ns + i;
                        let rc = dict.nonbasis.iter().position(|&k| k == v).map_or(0.0, |j| dict.d[j]);
                        -rc
                    })
                    .collect();
                let sign = match self.sense {
                    Sense::Minimize => 1.0,
                    Sense::Maximize => -1.0,
                };
                let dual_min: f64 = sf.b.iter().zip(&y).map(|(b, y)| b * y).sum::<f64>() + sf.constant;
                let mut dual_infeasibility: f64 = 0.0;
                for j in 0..dict.ncols {
                    if !is_art(dict.nonbasis[j]) {
                        dual_infeasibility = dual_infeasibility.max(-dict.d[j]);
                    }
                }
                let row_duals = (0..sf.n_orig_rows).map(|i| y[i] * sf.flip[i]).collect();
                let value = self.objective_value(&x);
                Ok(LpStatus::Optimal(LpSolution {
                    max_violation: self.max_violation(&x),
                    value,
                    x,
                    row_duals,
                    dual_value: sign * dual_min,
                    dual_infeasibility,
                    pivots,
                }))
            }
        }
    }

    fn recover(&self, maps: &[VarMap], z: &[f64], direction: bool) -> Vec<f64> {
        maps.iter()
            .map(|map| match *map {
                VarMap::Shift(k, lo) => z[k] + if direction { 0.0 } else { lo },
                VarMap::Mirror(k, hi) => if direction { -z[k] } else { hi - z[k] },
                VarMap::Split(p, q) => z[p] - z[q],
            })
            .collect()
    }

    /// CPLEX-LP style text rendering for debugging.
    pub fn to_lp_format(&self) -> String {
        fn linear(out: &mut String, coeffs: &[f64]) {
            let mut first = true;
            for (j, &c) in coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let sep = match (first, c < 0.0) {
                    (true, true) => "-",
                    (true, false) => "",
                    (false, true) => " - ",
                    (false, false) => " + ",
                };
                let _ = write!(out, "{}{:?} x{}", sep, c.abs(), j + 1);
                first = false;
            }
            if first {
                out.push_str("0 x1");
            }
        }
        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Minimize => "Minimize\n obj: ",
            Sense::Maximize => "Maximize\n obj: ",
        });
        linear(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for (i, ((row, rel), b)) in self.rows.iter().zip(&self.relations).zip(&self.rhs).enumerate() {
            let _ = write!(out, " r{}: ", i + 1);
            linear(&mut out, row);
            let op = match rel {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {} {:?}", op, b);
        }
        out.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let line = match (lo.is_finite(), hi.is_finite()) {
                (false, false) => format!(" x{} free", j + 1),
                (true, false) => format!(" x{} >= {:?}", j + 1, lo),
                (false, true) => format!(" -inf <= x{} <= {:?}", j + 1, hi),
                (true, true) => format!(" {:?} <= x{} <= {:?}", lo, j + 1, hi),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("End\n");
        out
    }
}

fn run_phase(dict: &mut Dictionary, opts: &LpOptions, pivots: &mut usize, may_enter: impl Fn(usize) -> bool) -> Phase {
    let mut degenerate = 0usize;
    loop {
        if *pivots >= opts.max_pivots {
            return Phase::Stalled;
        }
        let bland = degenerate >= opts.degenerate_run;
        let mut enter: Option<usize> = None;
        for j in 0..dict.ncols {
            if dict.d[j] >= -opts.optimality_tol || !may_enter(dict.nonbasis[j]) {
                continue;
            }
            enter = match enter {
                None => Some(j),
                Some(b) if bland && dict.nonbasis[j] < dict.nonbasis[b] => Some(j),
                Some(b) if !bland && dict.d[j] < dict.d[b] => Some(j),
                keep => keep,
            };
        }
        let Some(e) = enter else { return Phase::Optimal };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..dict.m {
            let a = dict.at(i, e);
            if a <= opts.pivot_tol {
                continue;
            }
            let ratio = dict.beta[i].max(0.0) / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((r, best)) => {
                    if ratio < best || (ratio == best && dict.basis[i] < dict.basis[r]) {
                        Some((i, ratio))
                    } else {
                        Some((r, best))
                    }
                }
            };
        }
        let Some((r, ratio)) = leave else { return Phase::Unbounded(e) };
        if ratio == 0.0 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        dict.pivot(r, e);
        *pivots += 1;
    }
}
