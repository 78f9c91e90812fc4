use lyapcert_core::cones::PolyhedralCone;
use lyapcert_core::conic::{
    assemble_lp, initial_partitions, run_hierarchy, ConicSystem, HierarchyOptions, HierarchyOutcome, Level,
    RationalCandidate,
};
use lyapcert_core::linprog::LpStatus;
use lyapcert_core::oracle::{verify_conic, ConicOracleOptions};
use lyapcert_core::poly::{parse_polynomial, RatPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> RatPoly {
    parse_polynomial(s, 2).unwrap()
}

fn example3() -> ConicSystem {
    let k = PolyhedralCone::new(2, vec![vec![-0.25, 1.0], vec![1.0, -0.25]]).unwrap();
    ConicSystem::new(vec![p("-x1 - 2*x2"), p("-x1 - x2")], k).unwrap()
}

fn certificate(sys: &ConicSystem, levels: &[Level]) -> lyapcert_core::conic::ConicCertificate {
    match run_hierarchy(sys, levels, &HierarchyOptions::default()).unwrap() {
        HierarchyOutcome::Certificate(c) => c,
        HierarchyOutcome::Exhausted(r) => panic!("no certificate: {r:?}"),
    }
}

#[test]
fn example3_certificate_passes_the_oracle() {
    let c = certificate(&example3(), &[Level { d: 2, r: 0, sweeps: 6 }]);
    assert!(c.margin >= 1e-6);
    let report = verify_conic(&c.candidate, &example3(), &ConicOracleOptions::default()).unwrap();
    assert!(report.pass(), "{}", report.summary());
    // the LP margin bounds h from below on every cell
    assert!(report.check("positivity").unwrap().extreme >= c.margin - 1e-6);
}

#[test]
fn contraction_certified_at_coarsest_level() {
    let sys = ConicSystem::new(vec![p("-x1"), p("-x2")], PolyhedralCone::nonnegative_orthant(2)).unwrap();
    let c = certificate(&sys, &[Level { d: 2, r: 0, sweeps: 1 }]);
    assert_eq!(c.sweeps, 0);
}

#[test]
fn expansion_exhausts_the_schedule() {
    let sys = ConicSystem::new(vec![p("x1"), p("x2")], PolyhedralCone::nonnegative_orthant(2)).unwrap();
    let out = run_hierarchy(&sys, &[Level { d: 2, r: 0, sweeps: 4 }], &HierarchyOptions::default()).unwrap();
    let HierarchyOutcome::Exhausted(reports) = out else { panic!("unexpected certificate") };
    assert_eq!(reports.len(), 1);
    assert!(reports[0].best_margin.unwrap() < 1e-6);
}

#[test]
fn zero_h_has_zero_margin() {
    let sys = ConicSystem::new(vec![p("-x1"), p("-x2")], PolyhedralCone::nonnegative_orthant(2)).unwrap();
    let clp = assemble_lp(&sys, 2, 0, &initial_partitions(sys.cone()).unwrap()).unwrap();
    let mut x = vec![0.0; clp.lp.num_vars()];
    let t = x.len() - 1;
    x[t] = 0.0;
    assert!(clp.lp.max_violation(&x) <= 0.0);
    x[t] = 1e-9;
    assert!(clp.lp.max_violation(&x) > 0.0);
}

#[test]
fn refinement_never_lowers_the_margin() {
    let sys = example3();
    let mut parts = initial_partitions(sys.cone()).unwrap();
    let mut last = f64::NEG_INFINITY;
    for _ in 0..5 {
        let clp = assemble_lp(&sys, 4, 0, &parts).unwrap();
        let LpStatus::Optimal(s) = clp.lp.solve().unwrap() else { panic!() };
        assert!(s.value >= last - 1e-8);
        last = s.value;
        for ps in parts.iter_mut() {
            if ps.partition.refinable() {
                ps.partition.refine_all().unwrap();
            }
        }
    }
}

#[test]
fn decrease_transfers_to_all_radii() {
    let sys = example3();
    let c = certificate(&sys, &[Level { d: 2, r: 0, sweeps: 6 }]);
    let v = &c.candidate;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 1000 {
        let u: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if !sys.cone().contains(&u, 0.0) || sys.cone().min_slack(&u) < 1e-6 {
            continue;
        }
        let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
        for rho in [0.1, 1.0, 10.0] {
            let x: Vec<f64> = u.iter().map(|a| a * rho / norm).collect();
            let fx = sys.eval_f(&x);
            let g = v.gradient(&x);
            assert!(g[0] * fx[0] + g[1] * fx[1] < 0.0);
            assert!(v.value(&x) > 0.0);
        }
        checked += 1;
    }
}

#[test]
fn rational_candidate_round_trip() {
    let v = RationalCandidate::new(p("x1^4 + x2^4").to_f64(), 1).unwrap();
    assert!((v.value(&[1.0, 1.0]) - 1.0).abs() < 1e-15);
    assert!(RationalCandidate::new(p("x1^2 + x2").to_f64(), 0).is_err());
}
