use lyapcert_core::cones::{cone_orthant_sections, sample_barycentric, PolyhedralCone, Simplex, SimplicialPartition};
use lyapcert_core::conic::RationalCandidate;
use lyapcert_core::oracle::fd_gradient_check;
use lyapcert_core::poly::{multisets, vertex_tuple_values, FloatPoly, Monomial, SymmetricTensor};
use lyapcert_core::tangency::eta_multipliers;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_homogeneous(rng: &mut ChaCha8Rng, n: usize, d: u32) -> FloatPoly {
    let terms = Monomial::of_degree(n, d).into_iter().map(|m| (m, rng.gen_range(-1.0..1.0)));
    FloatPoly::from_terms(n, terms).unwrap()
}

fn random_cell(rng: &mut ChaCha8Rng, n: usize) -> Simplex {
    loop {
        let verts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
                let s: f64 = v.iter().sum();
                v.iter().map(|x| x / s).collect()
            })
            .collect();
        if let Ok(s) = Simplex::new(verts) {
            return s;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn brute_force_diameter(p: &SimplicialPartition) -> f64 {
    let mut best: f64 = 0.0;
    for c in p.cells() {
        for a in c.vertices() {
            for b in c.vertices() {
                let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                best = best.max(d);
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_diagonal_matches_polynomial(seed in any::<u64>(), n in 2usize..4, d in 1u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_homogeneous(&mut rng, n, d);
        let t = SymmetricTensor::from_polynomial_of_order(&p, d as usize);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let diag = t.eval(&vec![x.clone(); d as usize]).unwrap();
        prop_assert!((diag - p.eval(&x)).abs() <= 1e-10 * (1.0 + p.eval(&x).abs()));
        prop_assert_eq!(t.to_polynomial().terms().count(), p.terms().count());
    }

    #[test]
    fn tensor_is_permutation_symmetric(seed in any::<u64>(), n in 2usize..4, d in 2u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_homogeneous(&mut rng, n, d);
        let t = SymmetricTensor::from_polynomial_of_order(&p, d as usize);
        let mut pts: Vec<Vec<f64>> = (0..d).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let a = t.eval(&pts).unwrap();
        pts.reverse();
        pts.swap(0, (d - 1) as usize / 2);
        let b = t.eval(&pts).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    /// Multilinear expansion over a cell: p(Σλ_j v_j) = Σ_a mult(a)·λ^a·H[v_a].
    #[test]
    fn tuple_expansion_reproduces_polynomial(seed in any::<u64>(), n in 2usize..4, d in 1u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_homogeneous(&mut rng, n, d);
        let cell = random_cell(&mut rng, n);
        let values = vertex_tuple_values(&p, d, cell.vertices());
        let lambda = sample_barycentric(&mut rng, n);
        let mut sum = 0.0;
        for (m, v) in &values {
            let mut mult = 1.0;
            let mut total = 0u32;
            for (j, &e) in m.exponents().iter().enumerate() {
                for k in 1..=e {
                    total += 1;
                    mult *= total as f64 / k as f64;
                }
                mult *= lambda[j].powi(e as i32);
            }
            sum += mult * v;
        }
        prop_assert!((sum - p.eval(&cell.point(&lambda))).abs() <= 1e-10);
        prop_assert_eq!(values.len(), multisets(n, d).len());
    }

    #[test]
    fn refinement_keeps_a_cover(seed in any::<u64>(), steps in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = PolyhedralCone::nonnegative_orthant(3);
        let section = cone_orthant_sections(&k).unwrap().remove(0);
        let mut part = SimplicialPartition::new(section.simplex.clone());
        for _ in 0..steps {
            let m = part.len();
            let pick: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
            if pick.is_empty() { part.refine_all().unwrap(); } else { part.refine(&pick).unwrap(); }
        }
        for _ in 0..50 {
            let x = section.simplex.sample(&mut rng);
            prop_assert!(part.locate(&x, 1e-10).is_some());
        }
        prop_assert!((part.diameter() - brute_force_diameter(&part)).abs() < 1e-12);
    }

    /// `f + η` is tangent to every active face and complementary.
    #[test]
    fn eta_is_tangent_and_complementary(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grads: Vec<Vec<f64>> = (0..2).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let f: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = eta_multipliers(&f, &grads).unwrap();
        let mut v = f.clone();
        for (g, l) in grads.iter().zip(&lambda) {
            for (vi, gi) in v.iter_mut().zip(g) { *vi += l * gi; }
        }
        for (g, l) in grads.iter().zip(&lambda) {
            prop_assert!(*l >= 0.0);
            prop_assert!(dot(g, &v) >= -1e-9);
            prop_assert!((l * dot(g, &v)).abs() <= 1e-9);
        }
    }
}

#[test]
fn diameter_shrinks_under_global_refinement() {
    // Longest-edge bisection of a triangle does not halve the diameter in
    // one round; after every two rounds it has strictly decreased.
    let k = PolyhedralCone::nonnegative_orthant(3);
    let section = cone_orthant_sections(&k).unwrap().remove(0);
    let mut part = SimplicialPartition::new(section.simplex);
    let mut history = vec![part.diameter()];
    for _ in 0..8 {
        part.refine_all().unwrap();
        history.push(part.diameter());
        assert!((part.diameter() - brute_force_diameter(&part)).abs() < 1e-12);
    }
    for w in history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    for w in history.windows(3) {
        assert!(w[2] < w[0]);
    }
    assert!(history[8] <= history[0] / 4.0 + 1e-12);
}

#[test]
fn closed_form_gradient_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let n = 2 + case % 2;
        let d = [2u32, 3, 4][case % 3];
        let h = random_homogeneous(&mut rng, n, d);
        let r = (case % 3) as u32;
        let v = RationalCandidate::new(h, r).unwrap();
        let points: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s = rng.gen_range(0.1..10.0) / dot(&u, &u).sqrt();
                u.iter().map(|x| x * s).collect()
            })
            .collect();
        let err = fd_gradient_check(&v, &points);
        assert!(err <= 1e-6, "case {case}: {err}");
    }
}

#[test]
fn zero_polynomial_gradient_with_r_zero() {
    let p = lyapcert_core::poly::parse_polynomial("x1^4 + x2^4", 2).unwrap().to_f64();
    let v = RationalCandidate::new(p.clone(), 0).unwrap();
    let x = [0.7, -1.3];
    let g: Vec<f64> = p.gradient().iter().map(|q| q.eval(&x)).collect();
    assert_eq!(v.gradient(&x), g);
}
