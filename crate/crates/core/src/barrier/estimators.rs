use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::stats::{norm_cdf, Moments};

use super::process::{barrier_indicator, fill_normals, BarrierProblem, MCEstimate, PathSampler, ProcessCovariance};

/// `P(Y_i >= -x, i <= n; Y_n ∈ [-x + y, -x + y + 1])` for the standard Gaussian walk.
pub fn ballot_mc<R: Rng + ?Sized>(n: usize, x: f64, y: f64, samples: u64, rng: &mut R) -> MCEstimate {
    let (lo, hi) = (-x + y, -x + y + 1.0);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut s = 0.0;
        let mut alive = true;
        for _ in 0..n {
            s += rng.sample::<f64, _>(StandardNormal);
            if s < -x {
                alive = false;
                break;
            }
        }
        if alive && s >= lo && s <= hi {
            hits += 1;
        }
    }
    MCEstimate::from_hits(hits, samples)
}

/// `P(W_t <= g, t <= n; W_n ∈ [s, s + 1])` for Brownian motion, by reflection.
pub fn bridge_reflection(n: f64, g: f64, s: f64) -> f64 {
    let sd = n.sqrt();
    let window = |a: f64| norm_cdf((a + 1.0) / sd) - norm_cdf(a / sd);
    if g.is_infinite() {
        return window(s);
    }
    (window(s) - window(s - 2.0 * g)).max(0.0)
}

/// Brownian motion on `[0, n]` sampled at `steps` points. Between grid points the
/// path is a bridge, and each sample contributes its exact probability of not
/// crossing `g`, so the estimate has no monitoring bias.
pub fn brownian_mc<R: Rng + ?Sized>(n: f64, g: f64, s: f64, steps: usize, samples: u64, rng: &mut R) -> MCEstimate {
    let dt = n / steps as f64;
    let sd = dt.sqrt();
    let mut m = Moments::default();
    for _ in 0..samples {
        let mut w = 0.0;
        let mut log_survive = 0.0;
        let mut dead = false;
        for _ in 0..steps {
            let next = w + sd * rng.sample::<f64, _>(StandardNormal);
            if next > g {
                dead = true;
                // the rest of the path is irrelevant
                break;
            }
            log_survive += (-(-2.0 * (g - w) * (g - next) / dt).exp()).ln_1p();
            w = next;
        }
        let v = if !dead && w >= s && w <= s + 1.0 { log_survive.exp() } else { 0.0 };
        m.push(v);
    }
    MCEstimate::from_moments(&m)
}

/// Plain Monte Carlo for `P(B_Z(n, t, h))`; the covariance is factorised once.
pub fn barrier_mc<R: Rng + ?Sized>(problem: &BarrierProblem, samples: u64, rng: &mut R) -> Result<MCEstimate> {
    let n = problem.n;
    let mut hits = 0u64;
    match &problem.covariance {
        ProcessCovariance::Walk => {
            for _ in 0..samples {
                let mut s = 0.0;
                let mut alive = true;
                for i in 0..n - 1 {
                    s += rng.sample::<f64, _>(StandardNormal);
                    if s > problem.h[i] {
                        alive = false;
                        break;
                    }
                }
                if alive {
                    s += rng.sample::<f64, _>(StandardNormal);
                    if s >= problem.t && s <= problem.t + 1.0 {
                        hits += 1;
                    }
                }
            }
        }
        ProcessCovariance::Custom(_) => {
            let sampler = PathSampler::new(&problem.covariance, n)?;
            let (mut xi, mut z) = (vec![0.0; n], vec![0.0; n]);
            for _ in 0..samples {
                fill_normals(rng, &mut xi);
                sampler.path(&xi, &mut z);
                if barrier_indicator(&z, &problem.h, problem.t) {
                    hits += 1;
                }
            }
        }
    }
    Ok(MCEstimate::from_hits(hits, samples))
}

/// Barrier shift `(log n)^{3/4}`.
pub fn barrier_shift(n: usize) -> f64 {
    (n as f64).ln().powf(0.75)
}

/// Monte Carlo ratio `p_Y(n, t, h + s) / p_Y(n, t', h - s)` with `s = (log n)^{3/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    /// Delta-method standard error.
    pub std_error: f64,
    pub numerator: MCEstimate,
    pub denominator: MCEstimate,
}

pub fn ratio_stability<R: Rng + ?Sized>(n: usize, t: f64, t_prime: f64, h: f64, samples: u64, rng: &mut R) -> RatioEstimate {
    let s = barrier_shift(n);
    let up = BarrierProblem::flat(n, h + s, t, ProcessCovariance::Walk).expect("n >= 1");
    let down = BarrierProblem::flat(n, h - s, t_prime, ProcessCovariance::Walk).expect("n >= 1");
    let num = barrier_mc(&up, samples, rng).expect("walk needs no factorisation");
    let den = barrier_mc(&down, samples, rng).expect("walk needs no factorisation");
    let ratio = num.probability / den.probability;
    let rel = ((num.std_error / num.probability).powi(2) + (den.std_error / den.probability).powi(2)).sqrt();
    RatioEstimate { ratio, std_error: ratio * rel, numerator: num, denominator: den }
}

/// The constant `C = p n^{3/2} / (|t| log n)` in `p_{B,G}(n, t, h) <= C |t| log n / n^{3/2}`.
pub fn ub_barrier_constant(p: f64, n: usize, t: f64) -> f64 {
    let nf = n as f64;
    p * nf.powf(1.5) / (t.abs() * nf.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn one_step_ballot() {
        let e = ballot_mc(1, 3.0, 1.0, 200_000, &mut rng::from_seed(1));
        let exact = norm_cdf(-1.0) - norm_cdf(-2.0);
        assert!((e.probability - exact).abs() < 4.0 * e.std_error);
    }

    #[test]
    fn reflection_limits() {
        let open = bridge_reflection(4.0, f64::INFINITY, -2.0);
        assert!((open - (norm_cdf(-0.5) - norm_cdf(-1.0))).abs() < 1e-15);
        assert!((bridge_reflection(4.0, 1e6, -2.0) - open).abs() < 1e-15);
        assert!(bridge_reflection(4.0, 1e-12, -1.5) < 1e-11);
    }

    #[test]
    fn unconstrained_barrier_is_window() {
        let p = BarrierProblem::flat(9, f64::INFINITY, -1.0, ProcessCovariance::Walk).unwrap();
        let e = barrier_mc(&p, 100_000, &mut rng::from_seed(2)).unwrap();
        let exact = norm_cdf(0.0) - norm_cdf(-1.0 / 3.0);
        assert!((e.probability - exact).abs() < 4.0 * e.std_error);
    }

    #[test]
    fn ratio_of_identical_problems() {
        let mut r = rng::from_seed(5);
        let e = ratio_stability(64, -3.0, -3.0, 1e9, 20_000, &mut r);
        assert!((e.ratio - 1.0).abs() < 4.0 * e.std_error);
    }
}
