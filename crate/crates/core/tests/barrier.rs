use cuefield::barrier::{
    ballot_mc, barrier_mc, bridge_reflection, brownian_mc, cosine_perturbed_walk, fill_normals, slepian_sandwich_check,
    two_ray_bound_check, two_ray_mc, BarrierProblem, PathSampler, ProcessCovariance, TwoRayCoupling, TwoRaySpec,
};
use cuefield::rng;
use cuefield::stats::norm_cdf;
use nalgebra::DMatrix;

/// `P(Z_1 <= h, Z_2 ∈ [t, t+1])` for the two-step walk, by Simpson's rule in `Z_1`.
fn two_step_oracle(h: f64, t: f64) -> f64 {
    let (lo, n) = (-12.0f64, 20_000);
    let step = (h - lo) / n as f64;
    let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() * (norm_cdf(t + 1.0 - x) - norm_cdf(t - x));
    let mut s = f(lo) + f(h);
    for i in 1..n {
        s += f(lo + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * step / 3.0
}

#[test]
fn two_step_barrier_matches_quadrature() {
    for (h, t) in [(0.5, -1.0), (-0.3, -2.0), (1.5, 0.5)] {
        let exact = two_step_oracle(h, t);
        let p = BarrierProblem::flat(2, h, t, ProcessCovariance::Walk).unwrap();
        let e = barrier_mc(&p, 400_000, &mut rng::from_seed(41)).unwrap();
        assert!((e.probability - exact).abs() < 4.0 * e.std_error, "{} vs {exact}", e.probability);
        let c = p.with_covariance(ProcessCovariance::Custom(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0])));
        let e = barrier_mc(&c, 400_000, &mut rng::from_seed(42)).unwrap();
        assert!((e.probability - exact).abs() < 4.0 * e.std_error);
    }
}

#[test]
fn coupled_monotonicity_is_exact() {
    let n = 64;
    let cov = ProcessCovariance::Custom(cosine_perturbed_walk(n, 0.5));
    let sampler = PathSampler::new(&cov, n).unwrap();
    let base = BarrierProblem::flat(n, 2.0, -3.0, cov).unwrap();
    let higher = base.shifted(0.7);
    let mut r = rng::from_seed(43);
    let (mut xi, mut z) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..20_000 {
        fill_normals(&mut r, &mut xi);
        sampler.path(&xi, &mut z);
        assert!(!base.contains(&z) || higher.contains(&z));
    }
}

#[test]
fn walk_barrier_reproduces_ballot() {
    let (n, x, y) = (64, 3.0, 3.0);
    let a = ballot_mc(n, x, y, 400_000, &mut rng::from_seed(44));
    // flip sign: Y_i >= -x  <=>  -Y_i <= x, end window [x - y - 1, x - y]
    let mut h = vec![x; n - 1];
    h.shrink_to_fit();
    let p = BarrierProblem::new(n, h, x - y - 1.0, ProcessCovariance::Walk).unwrap();
    let b = barrier_mc(&p, 400_000, &mut rng::from_seed(45)).unwrap();
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.probability - b.probability).abs() < 4.0 * se, "{a:?} {b:?}");
}

#[test]
fn reflection_against_bridge_weighted_paths() {
    let exact = bridge_reflection(4.0, 1.0, -2.0);
    let e = brownian_mc(4.0, 1.0, -2.0, 64, 200_000, &mut rng::from_seed(46));
    assert!((e.probability - exact).abs() < 4.0 * e.std_error, "{} vs {exact}", e.probability);
}

#[test]
fn sandwich_with_cosine_perturbation() {
    let n = 128;
    let p = BarrierProblem::flat(n, 3.0, -2.0, ProcessCovariance::Custom(cosine_perturbed_walk(n, 0.5))).unwrap();
    let rep = slepian_sandwich_check(&p, 0.1, 40_000, &mut rng::from_seed(47)).unwrap();
    assert!(rep.holds(4.0), "{rep:?}");
}

#[test]
fn late_overlap_reduces_to_one_trunk() {
    // sharing the first n-1 steps, the joint event is
    // E[1{trunk, Z_{n-1} ∈ [z, z+1]} q(Z_{n-1})^2] with q the one-step window probability
    let (n, h, t) = (32, 2.0, -2.0);
    let base = BarrierProblem::flat(n, h, t, ProcessCovariance::Walk).unwrap();
    let spec = TwoRaySpec::new(base, TwoRayCoupling::Overlap { k: n - 1, z: t, perturbation: None }).unwrap();
    let joint = two_ray_mc(&spec, 200_000, &mut rng::from_seed(48)).unwrap();
    let mut r = rng::from_seed(49);
    let mut m = cuefield::stats::Moments::default();
    let mut xi = vec![0.0; n - 1];
    for _ in 0..200_000 {
        fill_normals(&mut r, &mut xi);
        let mut s = 0.0;
        let mut ok = true;
        for x in &xi {
            s += x;
            ok &= s <= h;
        }
        let q = norm_cdf(t + 1.0 - s) - norm_cdf(t - s);
        m.push(if ok && (t..=t + 1.0).contains(&s) { q * q } else { 0.0 });
    }
    let se = (joint.std_error.powi(2) + m.std_error().powi(2)).sqrt();
    assert!((joint.probability - m.mean).abs() < 4.0 * se, "{} vs {}", joint.probability, m.mean);
}

#[test]
fn two_ray_bounds_hold() {
    let n = 64;
    let base = BarrierProblem::flat(n, 2.0, -2.0, ProcessCovariance::Custom(cosine_perturbed_walk(n, 0.3))).unwrap();
    let sep = TwoRaySpec::new(base.clone(), TwoRayCoupling::Separated { cross: DMatrix::from_element(n, n, 0.2) }).unwrap();
    let rep = two_ray_bound_check(&sep, 0.1, 40_000, &mut rng::from_seed(50)).unwrap();
    assert!(rep.gap.holds(4.0), "{rep:?}");
    let ov = TwoRaySpec::new(base, TwoRayCoupling::Overlap { k: 16, z: -1.0, perturbation: None }).unwrap();
    let rep = two_ray_bound_check(&ov, 0.1, 40_000, &mut rng::from_seed(51)).unwrap();
    assert!(rep.gap.holds(4.0), "{rep:?}");
}
