//! Ballot and barrier probabilities for Gaussian walks and processes whose
//! covariance stays within a bounded distance of `i ∧ j`.

mod comparison;
mod estimators;
mod process;

pub use comparison::{
    cosine_perturbed_walk, slepian_sandwich_check, two_ray_bound_check, two_ray_mc, Gap, SandwichReport,
    TwoRayCoupling, TwoRayReport, TwoRaySpec,
};
pub use estimators::{
    ballot_mc, barrier_mc, barrier_shift, bridge_reflection, brownian_mc, ratio_stability, ub_barrier_constant,
    RatioEstimate,
};
pub use process::{
    barrier_indicator, fill_normals, walk_covariance, BarrierProblem, MCEstimate, PathSampler, ProcessCovariance,
};
