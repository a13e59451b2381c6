//! The log-correlated Gaussian field `G` on the disk, with
//! `E G(z) G(y) = -log|1 - z conj(y)| / 2` and `G(0) = 0`.

mod bias;
mod kernel;
mod restricted;
mod sampler;

pub use bias::{
    bias_mean, exp_moment_gaussian, exp_moment_gaussian_weighted, log_exp_moment_gaussian, BiasSpec,
    DEFAULT_SEPARATION_FLOOR,
};
pub use kernel::{cov_hyperbolic, cov_kernel, var_diff, variance};
pub use restricted::{restricted_transform, sector_anchors};
pub use sampler::{
    circle_tail_bound, sample_circle, sample_field, truncation_order, CircleSampler, CovarianceMatrix,
    FieldSample, GaussianSampler, WhiteNoisePlan, DEFAULT_CIRCLE_TOL,
};
