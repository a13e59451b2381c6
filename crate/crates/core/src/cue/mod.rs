//! CUE spectra and the field `U(z) = Σ_h log|1 - z e^{iθ_h}|`.

mod field;
mod poly;
mod relaxation;
mod sampler;
mod theory;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::principal_arg;

pub use field::{field_eval, field_grid, field_max, grid_methods, DirectGrid, FftGrid, FieldGrid, GridMethod};
pub use poly::CharPoly;
pub use relaxation::{relaxation_check, relaxation_check_poly, stated_form_threshold, RelaxationReport, FIXED_RADII};
pub use sampler::{haar_samplers, HaarSampler, QrSampler, VerblunskySampler};
pub use theory::{u_covariance, u_variance};

/// Eigenphases of an `N x N` unitary, each in `(-π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
}

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::Precondition("a spectrum needs N >= 1 phases".into()));
        }
        if let Some(&t) = phases.iter().find(|t| !(**t > -PI && **t <= PI)) {
            return Err(Error::Precondition(format!("phase {t} outside (-π, π]")));
        }
        Ok(PhaseVector { phases })
    }

    /// Phases of (approximately) unimodular eigenvalues.
    pub fn from_unit(eigenvalues: impl IntoIterator<Item = Complex64>) -> Self {
        PhaseVector { phases: eigenvalues.into_iter().map(principal_arg).collect() }
    }

    pub fn n(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.phases.iter().map(|&t| Complex64::from_polar(1.0, t))
    }

    /// `Tr U^k = Σ_h e^{ikθ_h}`.
    pub fn trace_power(&self, k: i32) -> Complex64 {
        self.phases.iter().map(|&t| Complex64::from_polar(1.0, k as f64 * t)).sum()
    }
}
