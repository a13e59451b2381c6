//! Exact Toeplitz determinants for rational symbols and the subset expansion
//! of CUE exponential moments.

mod det;
mod expansion;
mod probe;
mod symbol;

pub use det::{
    baxter_det, corrected_det, corrected_det_detailed, direct_det, subsets, CorrectedDet, DIRECT_DET_MAX_N,
    ROOT_SEPARATION,
};
pub use expansion::{
    bias_expansion, delta_bound, exp_moment_cue, expansion_ratio, max_abs_cz, DeltaBound, ExpansionTerm,
};
pub use probe::{cf_probe, truncation_tail, CharFnProbe, TruncationTail};
pub use symbol::{fourier_coeffs, RationalSymbol};
