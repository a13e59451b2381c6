use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{hyp_dist, DiskPoint};

use super::kernel::cov_kernel;

/// Minimum hyperbolic separation between bias points.
pub const DEFAULT_SEPARATION_FLOOR: f64 = 1e-9;

/// Exponential bias `B(F) = λ (Σ_{z ∈ plus} 2F(z) - Σ_{y ∈ minus} 2F(y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSpec {
    plus: Vec<DiskPoint>,
    minus: Vec<DiskPoint>,
    lambda: f64,
}

impl BiasSpec {
    pub fn new(plus: Vec<DiskPoint>, minus: Vec<DiskPoint>) -> Result<Self> {
        Self::with_floor(plus, minus, DEFAULT_SEPARATION_FLOOR)
    }

    pub fn with_floor(plus: Vec<DiskPoint>, minus: Vec<DiskPoint>, floor: f64) -> Result<Self> {
        if minus.len() > plus.len() {
            return Err(Error::InvalidBias(format!(
                "{} minus points exceed {} plus points",
                minus.len(),
                plus.len()
            )));
        }
        let all: Vec<DiskPoint> = plus.iter().chain(&minus).copied().collect();
        for i in 0..all.len() {
            for j in 0..i {
                let d = hyp_dist(all[i], all[j]);
                if d < floor {
                    return Err(Error::InvalidBias(format!(
                        "points {j} and {i} are {d:e} apart, below the floor {floor:e}"
                    )));
                }
            }
        }
        Ok(BiasSpec { plus, minus, lambda: 1.0 })
    }

    pub fn empty() -> Self {
        BiasSpec { plus: Vec::new(), minus: Vec::new(), lambda: 1.0 }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn plus(&self) -> &[DiskPoint] {
        &self.plus
    }

    pub fn minus(&self) -> &[DiskPoint] {
        &self.minus
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    /// The minus points as complex numbers, padded with zeros up to `|plus|`.
    pub fn padded_minus(&self) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = self.minus.iter().map(|p| p.z()).collect();
        y.resize(self.plus.len(), Complex64::new(0.0, 0.0));
        y
    }

    /// `B(F)` for a field given pointwise.
    pub fn apply(&self, mut field: impl FnMut(DiskPoint) -> f64) -> f64 {
        let p: f64 = self.plus.iter().map(|&z| field(z)).sum();
        let m: f64 = self.minus.iter().map(|&y| field(y)).sum();
        2.0 * self.lambda * (p - m)
    }

    /// `B` from field values listed as `plus` followed by `minus`.
    pub fn apply_values(&self, values: &[f64]) -> f64 {
        let (p, m) = values.split_at(self.plus.len());
        2.0 * self.lambda * (p.iter().sum::<f64>() - m[..self.minus.len()].iter().sum::<f64>())
    }

    /// Points in the order `plus` then `minus`.
    pub fn points(&self) -> Vec<DiskPoint> {
        self.plus.iter().chain(&self.minus).copied().collect()
    }
}

/// Mean shift of `G` under the tilt `e^B / E e^B`:
/// `μ(ζ) = λ (Σ 2 Cov(z, ζ) - Σ 2 Cov(y, ζ))`.
pub fn bias_mean(bias: &BiasSpec, at: DiskPoint) -> f64 {
    bias.apply(|p| cov_kernel(p, at))
}

fn log_abs_one_minus(z: Complex64, w: Complex64) -> Result<f64> {
    let v = (Complex64::new(1.0, 0.0) - z * w.conj()).norm_sqr();
    if !(v > f64::MIN_POSITIVE) {
        return Err(Error::Overflow(format!("factor 1 - z conj(w) vanishes at z={z}, w={w}")));
    }
    Ok(0.5 * v.ln())
}

/// `log E e^{B(G)}`, accumulated as a sum of log factors.
pub fn log_exp_moment_gaussian(bias: &BiasSpec) -> Result<f64> {
    let (p, m) = (bias.plus(), bias.minus());
    let mut s = 0.0;
    for &z in p {
        for &w in p {
            s -= log_abs_one_minus(z.z(), w.z())?;
        }
        for &y in m {
            s += 2.0 * log_abs_one_minus(z.z(), y.z())?;
        }
    }
    for &y in m {
        for &w in m {
            s -= log_abs_one_minus(y.z(), w.z())?;
        }
    }
    Ok(bias.lambda() * bias.lambda() * s)
}

/// `E e^{B(G)} = ∏|1 - z conj(y)|^2 / (∏_{y,w}(1 - y conj(w)) ∏_{z,w}(1 - z conj(w)))`,
/// products over ordered pairs, raised to `λ^2`.
pub fn exp_moment_gaussian(bias: &BiasSpec) -> Result<f64> {
    let v = log_exp_moment_gaussian(bias)?.exp();
    if !v.is_finite() {
        return Err(Error::Overflow("exp moment exceeds f64 range".into()));
    }
    Ok(v)
}

/// `E exp(Σ λ_i G(z_i)) = exp(½ Σ λ_i λ_j Cov(z_i, z_j))`.
pub fn exp_moment_gaussian_weighted(points: &[DiskPoint], weights: &[f64]) -> f64 {
    assert_eq!(points.len(), weights.len());
    let mut s = 0.0;
    for (i, (&a, &la)) in points.iter().zip(weights).enumerate() {
        for (&b, &lb) in points[..=i].iter().zip(weights) {
            let c = la * lb * cov_kernel(a, b);
            s += if a == b { c } else { 2.0 * c };
        }
    }
    (0.5 * s).exp()
}
