use num_complex::Complex64;

use crate::geometry::{hyp_dist, hyp_norm, DiskPoint};

/// `-log|1 - z conj(y)| / 2`.
pub fn cov_kernel(z: DiskPoint, y: DiskPoint) -> f64 {
    -0.25 * (Complex64::new(1.0, 0.0) - z.z() * y.z().conj()).norm_sqr().ln()
}

/// `Var G(z) = -log(1 - |z|^2) / 2`.
pub fn variance(z: DiskPoint) -> f64 {
    -0.5 * (-z.norm_sqr()).ln_1p()
}

/// `log cosh(t / 2)` without overflow for large `t`.
fn log_cosh_half(t: f64) -> f64 {
    let h = 0.5 * t;
    h + (-2.0 * h).exp().ln_1p() - std::f64::consts::LN_2
}

/// The covariance written through hyperbolic distances:
/// `½ log(cosh(d(0,y)/2) cosh(d(0,z)/2) / cosh(d(z,y)/2))`.
pub fn cov_hyperbolic(z: DiskPoint, y: DiskPoint) -> f64 {
    0.5 * (log_cosh_half(hyp_norm(y)) + log_cosh_half(hyp_norm(z)) - log_cosh_half(hyp_dist(z, y)))
}

/// `Var(G(z) - G(y)) = log cosh(d(z, y) / 2)`.
pub fn var_diff(z: DiskPoint, y: DiskPoint) -> f64 {
    log_cosh_half(hyp_dist(z, y))
}
