use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::registry::Registry;

use super::{CharPoly, PhaseVector};

/// `U` on `radius * e^{2πi(j + offset)/M}`, `j = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub radius: f64,
    pub m: usize,
    /// Half-cell shift applied when a grid point would hit an eigenvalue.
    pub offset: f64,
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius, 2.0 * PI * (j as f64 + self.offset) / self.m as f64)
    }

    /// Index and value of the largest entry.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, v)| if v > best.1 { (j, v) } else { best })
    }
}

/// `U(z) = Σ_h log|1 - z e^{iθ_h}|` by direct summation.
pub fn field_eval(phases: &PhaseVector, points: &[Complex64]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&z| {
            let mut s = 0.0;
            for (&t, e) in phases.phases().iter().zip(phases.eigenvalues()) {
                let d = (Complex64::new(1.0, 0.0) - z * e).norm_sqr();
                if d == 0.0 {
                    return Err(Error::Singularity { phase: t });
                }
                s += 0.5 * d.ln();
            }
            Ok(s)
        })
        .collect()
}

/// A way of evaluating `U` on an equispaced circular grid.
pub trait GridMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, phases: &PhaseVector, radius: f64, m: usize, offset: f64) -> Result<Vec<f64>>;
}

/// Registered grid methods: `direct` and `fft`.
pub fn grid_methods() -> Registry<dyn GridMethod> {
    Registry::new("grid method")
        .register("direct", || Box::new(DirectGrid) as Box<dyn GridMethod>)
        .register("fft", || Box::new(FftGrid) as Box<dyn GridMethod>)
}

/// `O(NM)` summation; the reference.
#[derive(Debug, Default, Clone, Copy)]
pub struct DirectGrid;

impl GridMethod for DirectGrid {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn evaluate(&self, phases: &PhaseVector, radius: f64, m: usize, offset: f64) -> Result<Vec<f64>> {
        let pts: Vec<Complex64> =
            (0..m).map(|j| Complex64::from_polar(radius, 2.0 * PI * (j as f64 + offset) / m as f64)).collect();
        field_eval(phases, &pts)
    }
}

/// Product-tree expansion of `∏(1 - z e^{iθ_h})` followed by one transform.
#[derive(Debug, Default, Clone, Copy)]
pub struct FftGrid;

impl GridMethod for FftGrid {
    fn name(&self) -> &'static str {
        "fft"
    }

    fn evaluate(&self, phases: &PhaseVector, radius: f64, m: usize, offset: f64) -> Result<Vec<f64>> {
        CharPoly::from_phases(phases).log_abs_grid(radius, m, offset)
    }
}

/// Whether some eigenvalue sits within `1e-12` of a grid angle on the unit circle.
pub(crate) fn grid_hits_spectrum(phases: &PhaseVector, radius: f64, m: usize) -> bool {
    if radius < 1.0 - 1e-12 {
        return false;
    }
    let cell = 2.0 * PI / m as f64;
    phases.phases().iter().any(|&t| {
        let x = t.rem_euclid(cell);
        x.min(cell - x) < 1e-12
    })
}

/// `U` on the `M`-grid of the given radius, shifted by half a cell if the
/// unshifted grid would meet an eigenvalue.
pub fn field_grid(phases: &PhaseVector, radius: f64, m: usize, method: &dyn GridMethod) -> Result<FieldGrid> {
    if m == 0 {
        return Err(Error::Precondition("grid size must be positive".into()));
    }
    let offset = if grid_hits_spectrum(phases, radius, m) { 0.5 } else { 0.0 };
    let values = method.evaluate(phases, radius, m, offset)?;
    Ok(FieldGrid { radius, m, offset, values })
}

/// Grid maximum, with the fft method when `M` is a power of two.
pub fn field_max(phases: &PhaseVector, radius: f64, m: usize) -> Result<(usize, f64)> {
    let grid = if m.is_power_of_two() {
        field_grid(phases, radius, m, &FftGrid)?
    } else {
        field_grid(phases, radius, m, &DirectGrid)?
    };
    Ok(grid.argmax())
}
