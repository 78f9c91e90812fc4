//! Cross-checks of the LP and SDP solvers against brute-force oracles.

use lyapcert_core::linprog::{LinearProgram, LpStatus, Relation, Sense};
use lyapcert_core::sdp::{min_eigenvalue, SdpConstraint, SdpStatus, SemidefiniteProgram};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-11 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Best objective over all basic feasible solutions of `{Ax = b, x ≥ 0}`.
fn vertex_enumeration_min(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
    let m = a.len();
    let n = c.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let sub: Vec<Vec<f64>> = a.iter().map(|row| idx.iter().map(|&j| row[j]).collect()).collect();
        if let Some(xb) = solve_square(sub, b.to_vec()) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let val: f64 = idx.iter().zip(&xb).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(val, |b: f64| b.min(val)));
            }
        }
        let mut i = m;
        while i > 0 && idx[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        idx[i - 1] += 1;
        for j in i..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[test]
fn lp_matches_vertex_enumeration_on_random_equality_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a: Vec<Vec<f64>> = (0..5).map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let x0: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = a.iter().map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
        let c: Vec<f64> = (0..8).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mut lp = LinearProgram::new(Sense::Minimize, c.clone());
        for (row, &bi) in a.iter().zip(&b) {
            lp.add_row(row.clone(), Relation::Eq, bi);
        }
        for j in 0..8 {
            lp.set_bounds(j, 0.0, f64::INFINITY);
        }
        let expected = vertex_enumeration_min(&a, &b, &c).expect("feasible by construction");
        match lp.solve().unwrap() {
            LpStatus::Optimal(s) => {
                assert!((s.value - expected).abs() < 1e-7, "{} vs {}", s.value, expected);
                assert!(s.max_violation < 1e-8);
                assert!(s.duality_gap() < 1e-7);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn lp_matches_vertex_enumeration_on_random_packing_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a: Vec<Vec<f64>> = (0..5).map(|_| (0..8).map(|_| rng.gen_range(0.05..1.0)).collect()).collect();
        let b: Vec<f64> = (0..5).map(|_| rng.gen_range(0.5..2.0)).collect();
        let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut lp = LinearProgram::new(Sense::Maximize, c.clone());
        for (row, &bi) in a.iter().zip(&b) {
            lp.add_row(row.clone(), Relation::Le, bi);
        }
        for j in 0..8 {
            lp.set_bounds(j, 0.0, f64::INFINITY);
        }
        // slack form [A | I] z = b, minimise −c
        let a_std: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..5).map(|k| if k == i { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        let mut c_std: Vec<f64> = c.iter().map(|v| -v).collect();
        c_std.extend([0.0; 5]);
        let expected = -vertex_enumeration_min(&a_std, &b, &c_std).unwrap();
        match lp.solve().unwrap() {
            LpStatus::Optimal(s) => {
                assert!((s.value - expected).abs() < 1e-7, "{} vs {}", s.value, expected);
                assert!(s.duality_gap() < 1e-7);
                assert!(s.dual_infeasibility < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn lp_solves_are_deterministic() {
    let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 2.0, -1.0]);
    lp.add_row(vec![1.0, 1.0, 1.0], Relation::Le, 3.0);
    lp.add_row(vec![1.0, -1.0, 0.0], Relation::Ge, -1.0);
    lp.add_row(vec![0.0, 1.0, 1.0], Relation::Eq, 2.0);
    for j in 0..3 {
        lp.set_bounds(j, 0.0, 5.0);
    }
    let a = format!("{:?}", lp.solve().unwrap());
    let b = format!("{:?}", lp.solve().unwrap());
    assert_eq!(a, b);
}

fn min_eig_program(a: &DMatrix<f64>) -> SemidefiniteProgram {
    let n = a.nrows();
    let mut sdp = SemidefiniteProgram::new(vec![n], 1);
    sdp.free_objective[0] = -1.0;
    for i in 0..n {
        for j in i..n {
            let mut c = SdpConstraint::new(a[(i, j)]);
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
fn sdp_matches_dense_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let b = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        let a = (&b + b.transpose()) * 0.5;
        let expected = min_eigenvalue(&a);
        match min_eig_program(&a).solve().unwrap() {
            SdpStatus::Solved(s) => {
                assert!((-s.primal_value - expected).abs() < 1e-7, "{} vs {}", -s.primal_value, expected);
                assert!(s.gap() < 1e-7);
                assert!(s.complementarity.abs() < 1e-6);
                assert!(s.primal_residual < 1e-8);
                let shifted = &s.x[0] + DMatrix::identity(6, 6) * 1e-7;
                assert!(shifted.cholesky().is_some());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
