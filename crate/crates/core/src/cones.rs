//! Polyhedral cones `K = {x : Cx ≥ 0}`, their ℓ1 sections per orthant, and
//! simplicial partitions of those sections.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::linalg::{dot, from_rows, lstsq, norm1, norm2, rank, sub};
use crate::linprog::{LinearProgram, LpStatus, Relation, Sense};
use crate::{Error, Result};

/// Tolerance for constraint activity and feasibility of enumerated vertices.
const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCone {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl PolyhedralCone {
    pub fn new(dim: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("cone dimension must be positive".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
            if r.iter().all(|&v| v == 0.0) {
                return Err(Error::Invalid(alloc::format!("cone row {} is zero", i + 1)));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid(alloc::format!("cone row {} is not finite", i + 1)));
            }
        }
        Ok(PolyhedralCone { dim, rows })
    }

    /// The whole space (no face rows).
    pub fn full(dim: usize) -> Self {
        PolyhedralCone { dim, rows: Vec::new() }
    }

    /// The nonnegative orthant `ℝⁿ₊`.
    pub fn nonnegative_orthant(dim: usize) -> Self {
        let rows = (0..dim).map(|i| unit(dim, i, 1.0)).collect();
        PolyhedralCone { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn num_faces(&self) -> usize {
        self.rows.len()
    }

    /// `min_i c_i·x` (`+∞` with no rows).
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.rows.iter().map(|r| dot(r, x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.min_slack(x) >= -tol
    }
}

/// Convex hull of `k ≤ n` affinely independent points on the ℓ1 unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Invalid("simplex needs at least one vertex".into()));
        };
        let n = first.len();
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if vertices.len() > n {
            return Err(Error::Invalid("more vertices than the ambient dimension".into()));
        }
        if let Some(v) = vertices.iter().find(|v| (norm1(v) - 1.0).abs() > 1e-9) {
            return Err(Error::Invalid(alloc::format!("vertex {:?} is not on the unit l1 sphere", v)));
        }
        if affine_dim(&vertices) + 1 != vertices.len() {
            return Err(Error::Invalid("simplex vertices are affinely dependent".into()));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Largest pairwise ℓ2 vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                best = best.max(norm2(&sub(&self.vertices[i], &self.vertices[j])));
            }
        }
        best
    }

    /// `Σ λ_j v_j`.
    pub fn point(&self, lambda: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (v, &l) in self.vertices.iter().zip(lambda) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += l * vi;
            }
        }
        x
    }

    pub fn centroid(&self) -> Vec<f64> {
        let k = self.vertices.len() as f64;
        self.point(&vec![1.0 / k; self.vertices.len()])
    }

    /// Barycentric coordinates of `x`; errors when `x` is off the affine hull
    /// by more than `1e−8`.
    pub fn barycentric(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let k = self.vertices.len();
        let a = DMatrix::from_fn(n + 1, k, |i, j| if i < n { self.vertices[j][i] } else { 1.0 });
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i] = x[i];
        }
        rhs[n] = 1.0;
        let lambda = lstsq(&a, &rhs);
        let residual = (&a * &lambda - &rhs).norm();
        if residual > 1e-8 {
            return Err(Error::OutsideAffineHull { residual });
        }
        Ok(lambda.iter().cloned().collect())
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.barycentric(x).is_ok_and(|l| l.iter().all(|&v| v >= -tol))
    }

    /// Splits at the midpoint of the longest edge (lowest index pair on ties).
    /// The first child replaces the edge's second vertex by the midpoint, the
    /// second child replaces the first.
    pub fn bisect_longest_edge(&self) -> Result<(Simplex, Simplex)> {
        let k = self.vertices.len();
        if k < 2 {
            return Err(Error::CannotRefine);
        }
        let (mut bi, mut bj, mut best) = (0, 1, -1.0);
        for i in 0..k {
            for j in i + 1..k {
                let len = norm2(&sub(&self.vertices[i], &self.vertices[j]));
                if len > best * (1.0 + 1e-12) {
                    (bi, bj, best) = (i, j, len);
                }
            }
        }
        let mid: Vec<f64> = self.vertices[bi].iter().zip(&self.vertices[bj]).map(|(a, b)| 0.5 * (a + b)).collect();
        let s = norm1(&mid);
        let mid: Vec<f64> = mid.iter().map(|v| v / s).collect();
        let mut a = self.vertices.clone();
        a[bj] = mid.clone();
        let mut b = self.vertices.clone();
        b[bi] = mid;
        Ok((Simplex { vertices: a }, Simplex { vertices: b }))
    }

    /// A uniformly distributed point (flat Dirichlet weights).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.point(&sample_barycentric(rng, self.vertices.len()))
    }
}

/// Uniform sample from the standard `(k−1)`-simplex of barycentric weights.
pub fn sample_barycentric<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(k);
    let mut prev = 0.0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

/// One simplex of an ℓ1 section, tagged with its orthant. Bit `i` of
/// `orthant` is set when coordinate `i` is nonpositive there.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub orthant: u32,
    pub simplex: Simplex,
}

pub fn orthant_signs(dim: usize, orthant: u32) -> Vec<f64> {
    (0..dim).map(|i| if orthant >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()
}

struct OrthantPolytope {
    orthant: u32,
    /// normalised constraint rows: cone rows first, then the sign rows
    constraints: Vec<Vec<f64>>,
    vertices: Vec<Vec<f64>>,
    /// `tight[c][v]`
    tight: Vec<Vec<bool>>,
}

fn unit(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = s;
    v
}

fn affine_dim(points: &[Vec<f64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let n = points[0].len();
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    rank(&from_rows(&diffs, n), 1e-9)
}

/// Largest `s` with `Cx ≥ s·‖c‖`, signed coordinates `≥ s`, on the ℓ1 slice.
fn interior_slack(cone: &PolyhedralCone, signs: &[f64]) -> Result<f64> {
    let n = cone.dim;
    let mut lp = LinearProgram::new(Sense::Maximize, {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        c
    });
    for r in &cone.rows {
        let nr = norm2(r);
        let mut row: Vec<f64> = r.iter().map(|v| v / nr).collect();
        row.push(-1.0);
        lp.add_row(row, Relation::Ge, 0.0);
    }
    for i in 0..n {
        let mut row = unit(n + 1, i, signs[i]);
        row[n] = -1.0;
        lp.add_row(row, Relation::Ge, 0.0);
    }
    let mut eq = signs.to_vec();
    eq.push(0.0);
    lp.add_row(eq, Relation::Eq, 1.0);
    lp.set_bounds(n, f64::NEG_INFINITY, 1.0);
    match lp.solve()? {
        LpStatus::Optimal(sol) => Ok(sol.value),
        LpStatus::Infeasible(_) => Ok(f64::NEG_INFINITY),
        LpStatus::Unbounded { .. } => Err(Error::Invalid("slack LP unbounded".into())),
        LpStatus::Stalled { pivots } => Err(Error::Invalid(alloc::format!("slack LP stalled after {pivots} pivots"))),
    }
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn orthant_polytope(cone: &PolyhedralCone, orthant: u32) -> OrthantPolytope {
    let n = cone.dim;
    let signs = orthant_signs(n, orthant);
    let mut constraints: Vec<Vec<f64>> = cone
        .rows
        .iter()
        .map(|r| {
            let nr = norm2(r);
            r.iter().map(|v| v / nr).collect()
        })
        .collect();
    for i in 0..n {
        constraints.push(unit(n, i, signs[i]));
    }
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    combinations(constraints.len(), n - 1, |sel| {
        let mut rows: Vec<Vec<f64>> = sel.iter().map(|&c| constraints[c].clone()).collect();
        rows.push(signs.clone());
        let a = from_rows(&rows, n);
        if rank(&a, 1e-10) < n {
            return;
        }
        let mut rhs = DVector::zeros(n);
        rhs[n - 1] = 1.0;
        let Some(x) = a.lu().solve(&rhs) else { return };
        let mut x: Vec<f64> = x.iter().map(|&v| if v.abs() < 1e-13 { 0.0 } else { v }).collect();
        if constraints.iter().any(|c| dot(c, &x) < -GEOM_TOL) {
            return;
        }
        let s = norm1(&x);
        for v in x.iter_mut() {
            *v /= s;
        }
        if !vertices.iter().any(|w| w.iter().zip(&x).all(|(a, b)| (a - b).abs() <= GEOM_TOL)) {
            vertices.push(x);
        }
    });
    // deterministic vertex order independent of the combination order
    vertices.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match y.total_cmp(x) {
                core::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        core::cmp::Ordering::Equal
    });
    let tight = constraints
        .iter()
        .map(|c| vertices.iter().map(|v| dot(c, v).abs() <= GEOM_TOL).collect())
        .collect();
    OrthantPolytope { orthant, constraints, vertices, tight }
}

impl OrthantPolytope {
    /// Pulling triangulation of the face spanned by `face` (vertex indices, affine
    /// dimension `k`): cone from the first vertex over the facets avoiding it.
    fn triangulate(&self, face: &[usize], k: usize) -> Vec<Vec<usize>> {
        if face.len() == k + 1 {
            return vec![face.to_vec()];
        }
        let apex = face[0];
        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in 0..self.constraints.len() {
            let sub_face: Vec<usize> = face.iter().copied().filter(|&v| self.tight[c][v]).collect();
            if sub_face.len() == face.len() || sub_face.contains(&apex) || sub_face.len() < k {
                continue;
            }
            let pts: Vec<Vec<f64>> = sub_face.iter().map(|&v| self.vertices[v].clone()).collect();
            if affine_dim(&pts) + 1 == k {
                facets.insert(sub_face);
            }
        }
        let mut out = Vec::new();
        for facet in facets {
            for mut cell in self.triangulate(&facet, k - 1) {
                cell.insert(0, apex);
                out.push(cell);
            }
        }
        out
    }

    fn simplices(&self, face: &[usize]) -> Vec<Simplex> {
        let pts: Vec<Vec<f64>> = face.iter().map(|&v| self.vertices[v].clone()).collect();
        let k = affine_dim(&pts);
        self.triangulate(face, k)
            .into_iter()
            .map(|cell| Simplex { vertices: cell.iter().map(|&v| self.vertices[v].clone()).collect() })
            .collect()
    }
}

fn full_dimensional_polytopes(cone: &PolyhedralCone) -> Result<Vec<OrthantPolytope>> {
    if cone.dim > 24 {
        return Err(Error::Invalid("orthant enumeration supports at most 24 dimensions".into()));
    }
    let mut out = Vec::new();
    for orthant in 0..(1u32 << cone.dim) {
        let signs = orthant_signs(cone.dim, orthant);
        if interior_slack(cone, &signs)? <= GEOM_TOL {
            continue;
        }
        out.push(orthant_polytope(cone, orthant));
    }
    Ok(out)
}

/// ℓ1 sections `{x ∈ K ∩ O_j : ‖x‖₁ = 1}` of every orthant in which `K` has
/// interior, triangulated into simplices when a section has more than `n`
/// vertices.
pub fn cone_orthant_sections(cone: &PolyhedralCone) -> Result<Vec<Section>> {
    let mut out = Vec::new();
    for poly in full_dimensional_polytopes(cone)? {
        let all: Vec<usize> = (0..poly.vertices.len()).collect();
        for simplex in poly.simplices(&all) {
            out.push(Section { orthant: poly.orthant, simplex });
        }
    }
    Ok(out)
}

/// ℓ1 sections of the face `F_i = K ∩ {c_i·x = 0}` (zero-based `i`). Pieces
/// lying on orthant boundaries are reported once.
pub fn face_sections(cone: &PolyhedralCone, i: usize) -> Result<Vec<Section>> {
    if i >= cone.rows.len() {
        return Err(Error::Invalid(alloc::format!("face index {} out of range", i + 1)));
    }
    let polys = full_dimensional_polytopes(cone)?;
    let mut pieces: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for (p, poly) in polys.iter().enumerate() {
        let face: Vec<usize> = (0..poly.vertices.len()).filter(|&v| poly.tight[i][v]).collect();
        if face.is_empty() {
            continue;
        }
        let pts: Vec<Vec<f64>> = face.iter().map(|&v| poly.vertices[v].clone()).collect();
        pieces.push((p, face, affine_dim(&pts)));
    }
    let top = pieces.iter().map(|p| p.2).max().unwrap_or(0);
    let mut seen: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut out = Vec::new();
    for (p, face, k) in pieces {
        if k != top {
            continue;
        }
        let poly = &polys[p];
        let mut key: Vec<Vec<f64>> = face.iter().map(|&v| poly.vertices[v].clone()).collect();
        key.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        let duplicate = seen.iter().any(|s| {
            s.len() == key.len()
                && s.iter().zip(&key).all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= GEOM_TOL))
        });
        if duplicate {
            continue;
        }
        seen.push(key);
        for simplex in poly.simplices(&face) {
            out.push(Section { orthant: poly.orthant, simplex });
        }
    }
    Ok(out)
}

/// Cells covering a parent simplex with pairwise disjoint interiors.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialPartition {
    parent: Simplex,
    cells: Vec<Simplex>,
}

impl SimplicialPartition {
    pub fn new(parent: Simplex) -> Self {
        SimplicialPartition { cells: vec![parent.clone()], parent }
    }

    pub fn parent(&self) -> &Simplex {
        &self.parent
    }

    pub fn cells(&self) -> &[Simplex] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `max_k max_{i,j} ‖v_i^k − v_j^k‖₂`.
    pub fn diameter(&self) -> f64 {
        self.cells.iter().map(Simplex::diameter).fold(0.0, f64::max)
    }

    /// Whether another bisection is possible (some cell has two vertices).
    pub fn refinable(&self) -> bool {
        self.parent.num_vertices() >= 2
    }

    /// Bisects the listed cells. Untouched cells keep their order and the
    /// children are appended in the order of `indices`.
    pub fn refine(&mut self, indices: &[usize]) -> Result<()> {
        let chosen: BTreeSet<usize> = indices.iter().copied().filter(|&i| i < self.cells.len()).collect();
        if chosen.is_empty() {
            return Ok(());
        }
        let mut kept = Vec::with_capacity(self.cells.len() + chosen.len());
        let mut children = Vec::with_capacity(2 * chosen.len());
        for (i, cell) in self.cells.iter().enumerate() {
            if chosen.contains(&i) {
                let (a, b) = cell.bisect_longest_edge()?;
                children.push(a);
                children.push(b);
            } else {
                kept.push(cell.clone());
            }
        }
        kept.extend(children);
        self.cells = kept;
        Ok(())
    }

    pub fn refine_all(&mut self) -> Result<()> {
        let all: Vec<usize> = (0..self.cells.len()).collect();
        self.refine(&all)
    }

    /// Distinct vertices over all cells, in first-seen order.
    pub fn vertex_set(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for c in &self.cells {
            for v in c.vertices() {
                if !out.iter().any(|w| w.iter().zip(v).all(|(a, b)| (a - b).abs() <= 1e-14)) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Index of some cell containing `x` (barycentric test with tolerance).
    pub fn locate(&self, x: &[f64], tol: f64) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(x, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn positive_orthant_has_one_section() {
        let s = cone_orthant_sections(&PolyhedralCone::nonnegative_orthant(2)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].orthant, 0);
        assert_eq!(s[0].simplex.vertices(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn example_cone_section() {
        let k = PolyhedralCone::new(2, vec![vec![-0.25, 1.0], vec![1.0, -0.25]]).unwrap();
        let s = cone_orthant_sections(&k).unwrap();
        assert_eq!(s.len(), 1);
        let v = s[0].simplex.vertices();
        assert!(close(&v[0], &[0.8, 0.2]) && close(&v[1], &[0.2, 0.8]), "{v:?}");
        let f1 = face_sections(&k, 0).unwrap();
        assert_eq!(f1.len(), 1);
        assert_eq!(f1[0].simplex.num_vertices(), 1);
        assert!(close(&f1[0].simplex.vertices()[0], &[0.8, 0.2]));
    }

    #[test]
    fn whole_plane_has_four_sections() {
        let s = cone_orthant_sections(&PolyhedralCone::full(2)).unwrap();
        assert_eq!(s.len(), 4);
        for sec in &s {
            assert_eq!(sec.simplex.num_vertices(), 2);
            assert!((sec.simplex.diameter() - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn orthant_faces() {
        let f = face_sections(&PolyhedralCone::nonnegative_orthant(2), 0).unwrap();
        assert_eq!(f.len(), 1);
        assert!(close(&f[0].simplex.vertices()[0], &[0.0, 1.0]));
        let f = face_sections(&PolyhedralCone::nonnegative_orthant(3), 0).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].simplex.vertices(), &[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn square_section_is_triangulated() {
        // ℝ³₊ cut by x1 ≤ x2 + x3 leaves a quadrilateral section
        let k = PolyhedralCone::new(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![-1.0, 1.0, 1.0]]).unwrap();
        let s = cone_orthant_sections(&k).unwrap();
        assert_eq!(s.len(), 2);
        let area: f64 = s.iter().map(|sec| {
            let v = sec.simplex.vertices();
            let a = sub(&v[1], &v[0]);
            let b = sub(&v[2], &v[0]);
            let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            0.5 * norm2(&cross)
        }).sum();
        // the cut removes the corner triangle x1 ≥ 1/2 (a quarter of the full area)
        let full = 3f64.sqrt() / 2.0;
        assert!((area - 0.75 * full).abs() < 1e-12, "area {area}");
    }

    #[test]
    fn barycentric_basics() {
        let s = Simplex::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let l = s.barycentric(&[0.5, 0.5]).unwrap();
        assert!(close(&l, &[0.5, 0.5]));
        let l = s.barycentric(&[1.0, 0.0]).unwrap();
        assert!(close(&l, &[1.0, 0.0]));
        assert!(matches!(s.barycentric(&[1.0, 1.0]), Err(Error::OutsideAffineHull { .. })));
    }

    #[test]
    fn bisection_examples() {
        let s = Simplex::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (a, b) = s.bisect_longest_edge().unwrap();
        assert_eq!(a.vertices(), &[vec![1.0, 0.0], vec![0.5, 0.5]]);
        assert_eq!(b.vertices(), &[vec![0.5, 0.5], vec![0.0, 1.0]]);
        let mut p = SimplicialPartition::new(s);
        assert!((p.diameter() - 2f64.sqrt()).abs() < 1e-15);
        p.refine_all().unwrap();
        assert!((p.diameter() - 0.5f64.sqrt()).abs() < 1e-15);
        let point = Simplex::new(vec![vec![0.8, 0.2]]).unwrap();
        assert!(matches!(point.bisect_longest_edge(), Err(Error::CannotRefine)));
    }

    #[test]
    fn invalid_inputs() {
        assert!(PolyhedralCone::new(2, vec![vec![0.0, 0.0]]).is_err());
        assert!(Simplex::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(Simplex::new(vec![vec![2.0, 0.0]]).is_err());
    }
}
