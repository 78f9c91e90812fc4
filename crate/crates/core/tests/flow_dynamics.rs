use lyapcert_core::cones::PolyhedralCone;
use lyapcert_core::conic::ConicSystem;
use lyapcert_core::flow::{simulate, step, FlowSystem};
use lyapcert_core::oracle::sample_set;
use lyapcert_core::poly::{parse_polynomial, RatPoly};
use lyapcert_core::sos::SemialgebraicSystem;
use lyapcert_core::tangency::{face_eta_polynomial, SemialgebraicSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> RatPoly {
    parse_polynomial(s, 2).unwrap()
}

fn example3() -> ConicSystem {
    let k = PolyhedralCone::new(2, vec![vec![-0.25, 1.0], vec![1.0, -0.25]]).unwrap();
    ConicSystem::new(vec![p("-x1 - 2*x2"), p("-x1 - x2")], k).unwrap()
}

fn example4() -> SemialgebraicSystem {
    let set = SemialgebraicSet::new(2, vec![p("x1 - x2^2"), p("1 - x1")], vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
    SemialgebraicSystem::new(vec![p("-x1^2"), p("0")], set).unwrap()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn example3_converges_from_the_paper_start() {
    let sys = FlowSystem::from_conic(&example3());
    let traj = simulate(&sys, &[2.0, 0.5], 20.0, 1e-3, None).unwrap();
    assert!(norm(traj.last().unwrap()) <= 1e-3);
    assert!(traj.states.iter().all(|x| sys.violation(x) <= 1e-8));
}

#[test]
fn example3_without_constraint_diverges() {
    let sys = FlowSystem::from_conic(&example3()).unconstrained();
    let traj = simulate(&sys, &[1.0, 0.0], 10.0, 1e-3, None).unwrap();
    let norms: Vec<f64> = traj.states.iter().map(|x| norm(x)).collect();
    assert!(norms.last().unwrap() > &10.0);
}

#[test]
fn face_correction_follows_branch_b() {
    let conic = example3();
    let sys = FlowSystem::from_conic(&conic);
    let x = [0.8, 0.2];
    let (_, eta) = step(&sys, &x, 1e-5).unwrap();
    let fb = face_eta_polynomial(conic.cone(), 0, conic.f()).unwrap();
    let analytic = fb.eta_b_at(&conic.eval_f(&x));
    let cos = (eta[0] * analytic[0] + eta[1] * analytic[1]) / (norm(&eta) * norm(&analytic));
    assert!(cos.clamp(-1.0, 1.0).acos() <= 1e-3);
}

#[test]
fn example4_trajectories_stay_feasible() {
    let sys = example4();
    let flow = FlowSystem::from_semialgebraic(&sys);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let starts = sample_set(&sys, 20, &mut rng).unwrap();
    for x0 in &starts {
        let v = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let traj = simulate(&flow, x0, 2.0, 1e-3, Some(&v)).unwrap();
        let worst = traj.states.iter().map(|x| flow.violation(x)).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "violation {worst}");
        assert!(traj.max_v_increase().unwrap() <= 1e-9 + 100.0 * 1e-6);
    }
}

/// `−η_used` lies in the normal cone at the new point.
#[test]
fn correction_is_an_inward_normal() {
    let sys = example4();
    let flow = FlowSystem::from_semialgebraic(&sys);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ys = sample_set(&sys, 100, &mut rng).unwrap();
    let mut boundary_steps = 0;
    for _ in 0..200 {
        let x2: f64 = rng.gen_range(-0.9..0.9);
        let x = [x2 * x2, x2];
        let (next, eta) = step(&flow, &x, 1e-2).unwrap();
        if norm(&eta) == 0.0 {
            continue;
        }
        boundary_steps += 1;
        for y in &ys {
            let s: f64 = eta.iter().zip(y.iter().zip(&next)).map(|(e, (a, b))| -e * (a - b)).sum();
            assert!(s <= 1e-6, "{s}");
        }
    }
    assert!(boundary_steps > 50);
}
