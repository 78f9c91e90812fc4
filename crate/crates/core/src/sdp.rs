//! Dense primal–dual interior-point solver for block semidefinite programs
//!
//! ```text
//! minimise   Σ_b ⟨C_b, X_b⟩ + c_fᵀu
//! subject to Σ_b ⟨A_kb, X_b⟩ + F_k·u = b_k   (k = 1…m)
//!            X_b ⪰ 0, u free
//! ```
//!
//! with dual `max bᵀy` s.t. `C_b − Σ_k y_k A_kb = Z_b ⪰ 0`, `Fᵀy = c_f`.
//! Search directions use Nesterov–Todd scaling and a Mehrotra
//! predictor–corrector step; the Newton system is solved in its augmented form
//! `[[M, F], [Fᵀ, 0]]` with `M_ij = ⟨A_i, W A_j W⟩`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::linalg::sqrt;
use crate::{Error, Result};

/// One equality `Σ ⟨A_b, X_b⟩ + F·u = rhs`. Matrix entries are given on or
/// above the diagonal as `(block, i, j, value)` with `i ≤ j`; an off-diagonal
/// entry stands for both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug, Default)]
pub struct SdpConstraint {
    pub entries: Vec<(usize, usize, usize, f64)>,
    pub free: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl SdpConstraint {
    pub fn new(rhs: f64) -> Self {
        SdpConstraint { entries: Vec::new(), free: Vec::new(), rhs }
    }

    /// Adds `value` at `(i, j)` and `(j, i)` of block `block`.
    pub fn add(&mut self, block: usize, i: usize, j: usize, value: f64) {
        if value != 0.0 {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            self.entries.push((block, i, j, value));
        }
    }

    pub fn add_free(&mut self, var: usize, value: f64) {
        if value != 0.0 {
            self.free.push((var, value));
        }
    }
}

#[derive(Clone, Debug)]
pub struct SemidefiniteProgram {
    pub blocks: Vec<usize>,
    pub objective: Vec<DMatrix<f64>>,
    pub free_objective: Vec<f64>,
    pub constraints: Vec<SdpConstraint>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Relative tolerance on residuals and duality gap.
    pub tol: f64,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: f64,
    /// Objective magnitude beyond which divergence is read as infeasibility.
    pub divergence: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { max_iter: 200, tol: 1e-10, step_fraction: 0.98, divergence: 1e8 }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    /// `Σ ⟨X_b, Z_b⟩`
    pub complementarity: f64,
    /// `max_k |A_k(X) + F_k u − b_k|`
    pub primal_residual: f64,
    /// largest entry of `C − A*(y) − Z` and of `Fᵀy − c_f`
    pub dual_residual: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        (self.primal_value - self.dual_value).abs()
    }

    /// Smallest eigenvalue over all `X` blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.x.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

/// Which side of the problem diverged (a heuristic, not a certificate).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    /// `bᵀy → +∞` with bounded dual residual: the primal looks infeasible.
    Primal,
    /// Primal objective `→ −∞` with bounded primal residual: the dual looks infeasible.
    Dual,
}

#[derive(Clone, Debug)]
pub enum SdpStatus {
    Solved(SdpSolution),
    Infeasible { side: Divergence, iterations: usize },
    /// Iteration budget exhausted; the last iterate is returned.
    MaxIter(SdpSolution),
    /// The iteration could not make further progress (loss of positive
    /// definiteness or a singular Newton system) before reaching tolerance.
    Stalled(SdpSolution),
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest `α` with `S + α·D ⪰ 0` (infinite when `D ⪰ 0`), given the Cholesky factor of `S`.
fn max_step(chol: &Cholesky<f64, nalgebra::Dyn>, d: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let Some(ld) = l.solve_lower_triangular(d) else { return 0.0 };
    let Some(mut m) = l.solve_lower_triangular(&ld.transpose()) else { return 0.0 };
    symmetrize(&mut m);
    let lmin = min_eigenvalue(&m);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    v: Vec<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let l = Cholesky::new(x.clone())?.l();
    let mut ltzl = l.transpose() * z * &l;
    symmetrize(&mut ltzl);
    let eig = SymmetricEigen::new(ltzl);
    if eig.eigenvalues.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let d: Vec<f64> = eig.eigenvalues.iter().map(|&e| sqrt(e)).collect();
    let q = eig.eigenvectors;
    let n = x.nrows();
    // G = L Q D^{-1/2},  G⁻¹ = D^{1/2} Qᵀ L⁻¹
    let mut lq = &l * &q;
    for j in 0..n {
        let s = 1.0 / sqrt(d[j]);
        for i in 0..n {
            lq[(i, j)] *= s;
        }
    }
    let l_inv = l.solve_lower_triangular(&DMatrix::identity(n, n))?;
    let mut g_inv = q.transpose() * l_inv;
    for i in 0..n {
        let s = sqrt(d[i]);
        for j in 0..n {
            g_inv[(i, j)] *= s;
        }
    }
    let w = &lq * lq.transpose();
    Some(Scaling { g: lq, g_inv, w, v: d })
}

impl SemidefiniteProgram {
    pub fn new(blocks: Vec<usize>, num_free: usize) -> Self {
        let objective = blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        SemidefiniteProgram { blocks, objective, free_objective: vec![0.0; num_free], constraints: Vec::new() }
    }

    pub fn num_free(&self) -> usize {
        self.free_objective.len()
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.iter().any(|&n| n == 0) {
            return Err(Error::Invalid("SDP block sizes must be positive".into()));
        }
        if self.constraints.is_empty() {
            return Err(Error::Invalid("SDP needs at least one equality".into()));
        }
        if self.objective.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch { expected: self.blocks.len(), found: self.objective.len() });
        }
        for (c, &n) in self.objective.iter().zip(&self.blocks) {
            if c.nrows() != n || c.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.nrows() });
            }
            if (c - c.transpose()).amax() > 1e-12 * (1.0 + c.amax()) {
                return Err(Error::Invalid("SDP objective block is not symmetric".into()));
            }
        }
        for con in &self.constraints {
            for &(b, i, j, _) in &con.entries {
                if b >= self.blocks.len() || j >= self.blocks[b] || i > j {
                    return Err(Error::Invalid(format!("SDP entry ({b}, {i}, {j}) out of range")));
                }
            }
            if con.free.iter().any(|&(k, _)| k >= self.num_free()) {
                return Err(Error::Invalid("SDP free variable index out of range".into()));
            }
        }
        Ok(())
    }

    /// `A_k(X)` for every constraint.
    fn apply(&self, x: &[DMatrix<f64>]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| {
                c.entries
                    .iter()
                    .map(|&(b, i, j, v)| if i == j { v * x[b][(i, j)] } else { 2.0 * v * x[b][(i, j)] })
                    .sum()
            })
            .collect()
    }

    /// `Σ_k y_k A_k`.
    fn adjoint(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (c, &yk) in self.constraints.iter().zip(y) {
            for &(b, i, j, v) in &c.entries {
                out[b][(i, j)] += yk * v;
                if i != j {
                    out[b][(j, i)] += yk * v;
                }
            }
        }
        out
    }

    fn free_matrix(&self) -> DMatrix<f64> {
        let mut f = DMatrix::zeros(self.constraints.len(), self.num_free());
        for (k, c) in self.constraints.iter().enumerate() {
            for &(j, v) in &c.free {
                f[(k, j)] += v;
            }
        }
        f
    }

    /// Objective value `⟨C, X⟩ + c_fᵀu` of a given point.
    pub fn objective_value(&self, x: &[DMatrix<f64>], u: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| inner(c, x)).sum::<f64>()
            + self.free_objective.iter().zip(u).map(|(c, v)| c * v).sum::<f64>()
    }

    /// `max_k |A_k(X) + F_k·u − b_k|` for a given point.
    pub fn equality_residual(&self, x: &[DMatrix<f64>], u: &[f64]) -> f64 {
        let ax = self.apply(x);
        self.constraints
            .iter()
            .zip(&ax)
            .map(|(c, a)| {
                let fu: f64 = c.free.iter().map(|&(j, v)| v * u[j]).sum();
                (a + fu - c.rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn solve(&self) -> Result<SdpStatus> {
        self.solve_with(&SdpOptions::default())
    }

    pub fn solve_with(&self, opts: &SdpOptions) -> Result<SdpStatus> {
        self.validate()?;
        let m = self.constraints.len();
        let p = self.num_free();
        let nb = self.blocks.len();
        let total_dim: usize = self.blocks.iter().sum();
        let b = DVector::from_iterator(m, self.constraints.iter().map(|c| c.rhs));
        let f = self.free_matrix();
        let cf = DVector::from_column_slice(&self.free_objective);
        let b_norm = b.amax();
        let c_norm = self.objective.iter().map(|c| c.amax()).fold(cf.amax(), f64::max);

        // per block, which constraints touch it
        let mut touching: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for (k, c) in self.constraints.iter().enumerate() {
            let mut seen: Vec<usize> = c.entries.iter().map(|e| e.0).collect();
            seen.sort_unstable();
            seen.dedup();
            for blk in seen {
                touching[blk].push(k);
            }
        }

        let a_norm = self
            .constraints
            .iter()
            .map(|c| c.entries.iter().map(|e| e.3.abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
            .max(1e-12);
        let scale0 = 10.0f64.max(sqrt(total_dim as f64));
        let xi = scale0.max((1.0 + b_norm) / a_norm);
        let eta = scale0.max(1.0 + c_norm);
        let mut x: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::identity(n, n) * xi).collect();
        let mut z: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::identity(n, n) * eta).collect();
        let mut y = DVector::<f64>::zeros(m);
        let mut u = DVector::<f64>::zeros(p);

        let snapshot = |x: &[DMatrix<f64>], z: &[DMatrix<f64>], y: &DVector<f64>, u: &DVector<f64>, iterations: usize| {
            let uv: Vec<f64> = u.iter().cloned().collect();
            let yv: Vec<f64> = y.iter().cloned().collect();
            let pobj = self.objective_value(x, &uv);
            let dobj = b.dot(y);
            let aty = self.adjoint(&yv);
            let mut dres: f64 = 0.0;
            for blk in 0..nb {
                dres = dres.max((&self.objective[blk] - &aty[blk] - &z[blk]).amax());
            }
            let fty = f.transpose() * y - &cf;
            dres = dres.max(fty.amax());
            SdpSolution {
                complementarity: x.iter().zip(z).map(|(a, b)| inner(a, b)).sum(),
                primal_residual: self.equality_residual(x, &uv),
                dual_residual: dres,
                x: x.to_vec(),
                z: z.to_vec(),
                y: yv,
                u: uv,
                primal_value: pobj,
                dual_value: dobj,
                iterations,
            }
        };

        for iter in 0..opts.max_iter {
            let xv: Vec<f64> = y.iter().cloned().collect();
            let ax = DVector::from_vec(self.apply(&x));
            let rp = &b - ax - &f * &u;
            let aty = self.adjoint(&xv);
            let rd: Vec<DMatrix<f64>> = (0..nb).map(|k| &self.objective[k] - &aty[k] - &z[k]).collect();
            let rf = &cf - f.transpose() * &y;
            let xz: f64 = x.iter().zip(&z).map(|(a, b)| inner(a, b)).sum();
            let mu = xz / total_dim as f64;
            let uv: Vec<f64> = u.iter().cloned().collect();
            let pobj = self.objective_value(&x, &uv);
            let dobj = b.dot(&y);

            let pinf = rp.amax() / (1.0 + b_norm);
            let dinf = rd.iter().map(|r| r.amax()).fold(rf.amax(), f64::max) / (1.0 + c_norm);
            let rel_gap = xz.max((pobj - dobj).abs()) / (1.0 + pobj.abs().min(dobj.abs()));
            if pinf <= opts.tol && dinf <= opts.tol && rel_gap <= opts.tol {
                return Ok(SdpStatus::Solved(snapshot(&x, &z, &y, &u, iter)));
            }
            if dobj > opts.divergence * (1.0 + b_norm) && dinf <= 1e-6 * dobj.abs() / (1.0 + c_norm) {
                return Ok(SdpStatus::Infeasible { side: Divergence::Primal, iterations: iter });
            }
            if -pobj > opts.divergence * (1.0 + c_norm) && pinf <= 1e-6 * pobj.abs() / (1.0 + b_norm) {
                return Ok(SdpStatus::Infeasible { side: Divergence::Dual, iterations: iter });
            }

            let Some(scalings) = x.iter().zip(&z).map(|(a, b)| nt_scaling(a, b)).collect::<Option<Vec<_>>>() else {
                return Ok(SdpStatus::Stalled(snapshot(&x, &z, &y, &u, iter)));
            };

            // Schur complement M_ij = ⟨A_i, W A_j W⟩
            let mut schur = DMatrix::<f64>::zeros(m + p, m + p);
            for blk in 0..nb {
                let w = &scalings[blk].w;
                let n = self.blocks[blk];
                for &j in &touching[blk] {
                    let mut waw = DMatrix::<f64>::zeros(n, n);
                    for &(bb, r, s, v) in &self.constraints[j].entries {
                        if bb != blk {
                            continue;
                        }
                        let wr = w.column(r);
                        let ws = w.column(s);
                        if r == s {
                            waw.ger(v, &wr, &wr, 1.0);
                        } else {
                            waw.ger(v, &wr, &ws, 1.0);
                            waw.ger(v, &ws, &wr, 1.0);
                        }
                    }
                    for &i in &touching[blk] {
                        if i > j {
                            continue;
                        }
                        let mut acc = 0.0;
                        for &(bb, r, s, v) in &self.constraints[i].entries {
                            if bb == blk {
                                acc += if r == s { v * waw[(r, s)] } else { 2.0 * v * waw[(r, s)] };
                            }
                        }
                        schur[(i, j)] += acc;
                        if i != j {
                            schur[(j, i)] += acc;
                        }
                    }
                }
            }
            for k in 0..m {
                for j in 0..p {
                    schur[(k, m + j)] = f[(k, j)];
                    schur[(m + j, k)] = f[(k, j)];
                }
            }
            let lu = schur.lu();

            // Direction for a complementarity target R (in scaled space).
            let solve_dir = |targets: &[DMatrix<f64>]| -> Option<(Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>, DVector<f64>)> {
                // R_c = G R̃ Gᵀ; rhs = r_p − A(R_c − W R_d W)
                let mut rc_minus: Vec<DMatrix<f64>> = Vec::with_capacity(nb);
                let mut rcs: Vec<DMatrix<f64>> = Vec::with_capacity(nb);
                for blk in 0..nb {
                    let sc = &scalings[blk];
                    let rc = &sc.g * &targets[blk] * sc.g.transpose();
                    let wrw = &sc.w * &rd[blk] * &sc.w;
                    rc_minus.push(&rc - wrw);
                    rcs.push(rc);
                }
                let a_rc = DVector::from_vec(self.apply(&rc_minus));
                let mut rhs = DVector::zeros(m + p);
                rhs.rows_mut(0, m).copy_from(&(&rp - a_rc));
                rhs.rows_mut(m, p).copy_from(&rf);
                let sol = lu.solve(&rhs)?;
                if sol.iter().any(|v| !v.is_finite()) {
                    return None;
                }
                let dy = sol.rows(0, m).into_owned();
                let du = sol.rows(m, p).into_owned();
                let dyv: Vec<f64> = dy.iter().cloned().collect();
                let atdy = self.adjoint(&dyv);
                let mut dxs = Vec::with_capacity(nb);
                let mut dzs = Vec::with_capacity(nb);
                for blk in 0..nb {
                    let dz = &rd[blk] - &atdy[blk];
                    let w = &scalings[blk].w;
                    let mut dx = &rcs[blk] - w * &dz * w;
                    symmetrize(&mut dx);
                    dxs.push(dx);
                    dzs.push(dz);
                }
                Some((dxs, dy, dzs, du))
            };

            let scaled_target = |blk: usize, r: &DMatrix<f64>| -> DMatrix<f64> {
                let v = &scalings[blk].v;
                DMatrix::from_fn(v.len(), v.len(), |i, j| 2.0 * r[(i, j)] / (v[i] + v[j]))
            };

            let chol_x: Option<Vec<_>> = x.iter().map(|a| Cholesky::new(a.clone())).collect();
            let chol_z: Option<Vec<_>> = z.iter().map(|a| Cholesky::new(a.clone())).collect();
            let (Some(chol_x), Some(chol_z)) = (chol_x, chol_z) else {
                return Ok(SdpStatus::Stalled(snapshot(&x, &z, &y, &u, iter)));
            };
            let steps = |dxs: &[DMatrix<f64>], dzs: &[DMatrix<f64>]| -> (f64, f64) {
                let ap = dxs.iter().zip(&chol_x).map(|(d, c)| max_step(c, d)).fold(f64::INFINITY, f64::min);
                let ad = dzs.iter().zip(&chol_z).map(|(d, c)| max_step(c, d)).fold(f64::INFINITY, f64::min);
                (ap, ad)
            };

            // predictor: R = −V²
            let pred_targets: Vec<DMatrix<f64>> = (0..nb)
                .map(|blk| {
                    let v = &scalings[blk].v;
                    let r = DMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { -v[i] * v[i] } else { 0.0 });
                    scaled_target(blk, &r)
                })
                .collect();
            let Some((dxa, _dya, dza, _dua)) = solve_dir(&pred_targets) else {
                return Ok(SdpStatus::Stalled(snapshot(&x, &z, &y, &u, iter)));
            };
            let (ap, ad) = steps(&dxa, &dza);
            let ap = ap.min(1.0);
            let ad = ad.min(1.0);
            let mut xz_aff = 0.0;
            for blk in 0..nb {
                xz_aff += inner(&(&x[blk] + &dxa[blk] * ap), &(&z[blk] + &dza[blk] * ad));
            }
            let mu_aff = (xz_aff / total_dim as f64).max(0.0);
            let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

            // corrector: R = σμI − V² − sym(ΔX̃ ΔZ̃)
            let corr_targets: Vec<DMatrix<f64>> = (0..nb)
                .map(|blk| {
                    let sc = &scalings[blk];
                    let dxt = &sc.g_inv * &dxa[blk] * sc.g_inv.transpose();
                    let dzt = sc.g.transpose() * &dza[blk] * &sc.g;
                    let prod = &dxt * &dzt;
                    let n = sc.v.len();
                    let r = DMatrix::from_fn(n, n, |i, j| {
                        let base = if i == j { sigma * mu - sc.v[i] * sc.v[i] } else { 0.0 };
                        base - 0.5 * (prod[(i, j)] + prod[(j, i)])
                    });
                    scaled_target(blk, &r)
                })
                .collect();
            let Some((dx, dy, dz, du)) = solve_dir(&corr_targets) else {
                return Ok(SdpStatus::Stalled(snapshot(&x, &z, &y, &u, iter)));
            };
            let (ap, ad) = steps(&dx, &dz);
            let ap = (opts.step_fraction * ap).min(1.0);
            let ad = (opts.step_fraction * ad).min(1.0);
            if ap < 1e-12 && ad < 1e-12 {
                return Ok(SdpStatus::Stalled(snapshot(&x, &z, &y, &u, iter)));
            }
            for blk in 0..nb {
                x[blk] += &dx[blk] * ap;
                z[blk] += &dz[blk] * ad;
                symmetrize(&mut x[blk]);
                symmetrize(&mut z[blk]);
            }
            u += du * ap;
            y += dy * ad;
        }
        Ok(SdpStatus::MaxIter(snapshot(&x, &z, &y, &u, opts.max_iter)))
    }

    /// SDPA sparse text form. The problem is written as SDPA's dual
    /// (`max ⟨F0, Y⟩` with `F0 = −C`, `⟨F_k, Y⟩ = b_k`); free variables become
    /// a diagonal block of split pairs `u = u⁺ − u⁻`.
    pub fn to_sdpa(&self) -> String {
        let p = self.num_free();
        let mut out = String::new();
        let _ = writeln!(out, "\"lyapcert SDP: min <C,X> + cf'u s.t. A(X) + F u = b\"");
        let _ = writeln!(out, "{}", self.constraints.len());
        let nblocks = self.blocks.len() + usize::from(p > 0);
        let _ = writeln!(out, "{}", nblocks);
        let mut sizes: Vec<String> = self.blocks.iter().map(|n| format!("{n}")).collect();
        if p > 0 {
            sizes.push(format!("-{}", 2 * p));
        }
        let _ = writeln!(out, "{}", sizes.join(" "));
        let rhs: Vec<String> = self.constraints.iter().map(|c| format!("{:?}", c.rhs)).collect();
        let _ = writeln!(out, "{}", rhs.join(" "));
        for (blk, c) in self.objective.iter().enumerate() {
            for i in 0..c.nrows() {
                for j in i..c.ncols() {
                    if c[(i, j)] != 0.0 {
                        let _ = writeln!(out, "0 {} {} {} {:?}", blk + 1, i + 1, j + 1, -c[(i, j)]);
                    }
                }
            }
        }
        let lp_block = self.blocks.len() + 1;
        for (j, &c) in self.free_objective.iter().enumerate() {
            if c != 0.0 {
                let _ = writeln!(out, "0 {} {} {} {:?}", lp_block, 2 * j + 1, 2 * j + 1, -c);
                let _ = writeln!(out, "0 {} {} {} {:?}", lp_block, 2 * j + 2, 2 * j + 2, c);
            }
        }
        for (k, con) in self.constraints.iter().enumerate() {
            for &(blk, i, j, v) in &con.entries {
                let _ = writeln!(out, "{} {} {} {} {:?}", k + 1, blk + 1, i + 1, j + 1, v);
            }
            for &(j, v) in &con.free {
                let _ = writeln!(out, "{} {} {} {} {:?}", k + 1, lp_block, 2 * j + 1, 2 * j + 1, v);
                let _ = writeln!(out, "{} {} {} {} {:?}", k + 1, lp_block, 2 * j + 2, 2 * j + 2, -v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solved(status: SdpStatus) -> SdpSolution {
        match status {
            SdpStatus::Solved(s) => s,
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    /// `max t` s.t. `A − tI ⪰ 0`, written as `X + tI = A`, minimise `−t`.
    pub(crate) fn min_eig_program(a: &DMatrix<f64>) -> SemidefiniteProgram {
        let n = a.nrows();
        let mut sdp = SemidefiniteProgram::new(vec![n], 1);
        sdp.free_objective[0] = -1.0;
        for i in 0..n {
            for j in i..n {
                let mut c = SdpConstraint::new(a[(i, j)]);
                // an off-diagonal entry counts twice in ⟨A, X⟩
                c.add(0, i, j, if i == j { 1.0 } else { 0.5 });
                if i == j {
                    c.add_free(0, 1.0);
                }
                sdp.constraints.push(c);
            }
        }
        sdp
    }

    #[test]
    fn trace_minimisation() {
        let mut sdp = SemidefiniteProgram::new(vec![2], 0);
        sdp.objective[0] = DMatrix::identity(2, 2);
        let mut c = SdpConstraint::new(1.0);
        c.add(0, 0, 0, 1.0);
        sdp.constraints.push(c);
        let s = solved(sdp.solve().unwrap());
        assert!((s.primal_value - 1.0).abs() < 1e-8);
        assert!((s.x[0][(0, 0)] - 1.0).abs() < 1e-8);
        assert!(s.x[0][(1, 1)].abs() < 1e-8 && s.x[0][(0, 1)].abs() < 1e-8);
    }

    #[test]
    fn eigenvalue_program() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let s = solved(min_eig_program(&a).solve().unwrap());
        assert!((s.u[0] - 1.0).abs() < 1e-8, "t = {}", s.u[0]);
        assert!(s.gap() < 1e-7);
        assert!(s.complementarity.abs() < 1e-6);
        assert!(s.min_eigenvalue() >= -1e-8);
    }

    #[test]
    fn dense_eigenvalue_program() {
        let a = DMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + ((j * 7 + i * 3) % 5) as f64);
        let expected = min_eigenvalue(&a);
        let s = solved(min_eig_program(&a).solve().unwrap());
        assert!((s.u[0] - expected).abs() < 1e-7, "{} vs {}", s.u[0], expected);
    }

    #[test]
    fn infeasible_program_is_flagged() {
        // X11 = −1 with X ⪰ 0
        let mut sdp = SemidefiniteProgram::new(vec![1], 0);
        let mut c = SdpConstraint::new(-1.0);
        c.add(0, 0, 0, 1.0);
        sdp.constraints.push(c);
        match sdp.solve().unwrap() {
            SdpStatus::Infeasible { side, .. } => assert_eq!(side, Divergence::Primal),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn sdpa_dump_lists_every_entry() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        let text = min_eig_program(&a).to_sdpa();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "3");
        assert_eq!(lines[2], "2");
        assert_eq!(lines[3], "2 -2");
        assert_eq!(lines[4], "1.0 0.5 2.0");
        assert!(text.contains("2 1 1 2 0.5\n"));
    }
}
