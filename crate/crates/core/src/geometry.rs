//! Hyperbolic geometry of the Poincaré disk.
//!
//! Points are stored in Cartesian complex form. Distances use
//! `d(a, b) = log((1 + t) / (1 - t))` with `t = |T_a(b)|`, evaluated through
//! `1 - t^2 = (1 - |a|^2)(1 - |b|^2) / |1 - a conj(b)|^2` so that points near the
//! boundary keep full relative precision.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest admissible modulus for a [`DiskPoint`].
pub const MAX_MODULUS: f64 = 1.0 - 1e-15;

/// Default wedge constant for [`wedge_check`]; only existence is known, so it is
/// configurable.
pub const DEFAULT_WEDGE_XI: f64 = 1.0;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_MODULUS {
            return Err(Error::OutsideDisk { re: z.re, im: z.im });
        }
        Ok(DiskPoint(z))
    }

    /// Real point `r` on the positive axis (or negative, for `r < 0`).
    pub fn real(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }

    pub fn polar(r: f64, phase: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar(r, phase))
    }

    pub const fn origin() -> Self {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn z(&self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn abs(&self) -> f64 {
        self.0.norm()
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn conj(&self) -> Self {
        DiskPoint(self.0.conj())
    }

    pub fn is_origin(&self) -> bool {
        self.0 == Complex64::new(0.0, 0.0)
    }

    /// Principal argument with `arg(-r) = π` for negative reals.
    pub fn arg(&self) -> f64 {
        principal_arg(self.0)
    }

    /// Rotation by `e^{iθ}`.
    pub fn rotate(&self, theta: f64) -> Self {
        DiskPoint(self.0 * Complex64::from_polar(1.0, theta))
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

/// Principal branch in `(-π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// `|1 - a conj(b)|^2 / ((1 - |a|^2)(1 - |b|^2))`, i.e. `1 / (1 - |T_a(b)|^2)`.
fn inv_one_minus_t2(a: DiskPoint, b: DiskPoint) -> f64 {
    let num = (Complex64::new(1.0, 0.0) - a.z() * b.z().conj()).norm_sqr();
    num / ((1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr()))
}

/// Hyperbolic distance (curvature normalised so that `d(0, z) = log((1+|z|)/(1-|z|))`).
pub fn hyp_dist(a: DiskPoint, b: DiskPoint) -> f64 {
    if a == b {
        return 0.0;
    }
    let t = mobius(a, b).abs().min(1.0);
    // log((1+t)/(1-t)) = 2 log(1+t) + log(1/(1-t^2))
    2.0 * t.ln_1p() + inv_one_minus_t2(a, b).ln()
}

/// Distance from the origin.
pub fn hyp_norm(z: DiskPoint) -> f64 {
    let r = z.abs();
    2.0 * r.atanh()
}

/// `cosh(d(a, b)) = 1 + 2|a - b|^2 / ((1 - |a|^2)(1 - |b|^2))`.
pub fn cosh_hyp_dist(a: DiskPoint, b: DiskPoint) -> f64 {
    1.0 + 2.0 * (a.z() - b.z()).norm_sqr() / ((1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr()))
}

/// Disk automorphism `T_y(z) = (z - y) / (1 - z conj(y))`, sending `y` to 0.
pub fn mobius(y: DiskPoint, z: DiskPoint) -> DiskPoint {
    DiskPoint(mobius_c(y.z(), z.z()))
}

/// `T_y(z)` on raw complex numbers (no domain check); used where `z` may sit on
/// the boundary or the formula is applied to conjugates.
#[inline]
pub fn mobius_c(y: Complex64, z: Complex64) -> Complex64 {
    (z - y) / (Complex64::new(1.0, 0.0) - z * y.conj())
}

/// Inverse automorphism `T_y^{-1}(w) = (w + y) / (1 + w conj(y))`, sending 0 to `y`.
pub fn mobius_inv(y: DiskPoint, w: DiskPoint) -> DiskPoint {
    DiskPoint((w.z() + y.z()) / (Complex64::new(1.0, 0.0) + w.z() * y.z().conj()))
}

/// Ray point at hyperbolic distance `i` from the origin in direction `phase`
/// (a unit complex number): `phase * tanh(i / 2)`.
pub fn geodesic_point(i: f64, phase: Complex64) -> DiskPoint {
    debug_assert!(i >= 0.0);
    let r = (0.5 * i).tanh().min(MAX_MODULUS);
    DiskPoint(phase * r)
}

/// `ζ_i` on the positive real axis.
pub fn zeta(i: f64) -> DiskPoint {
    geodesic_point(i, Complex64::new(1.0, 0.0))
}

/// Unit-spaced geodesic ray `{ω ζ_i : 0 <= i <= len}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicRay {
    pub phase: Complex64,
    pub len: usize,
}

impl GeodesicRay {
    pub fn new(phase_angle: f64, len: usize) -> Self {
        GeodesicRay { phase: Complex64::from_polar(1.0, phase_angle), len }
    }

    pub fn point(&self, i: usize) -> DiskPoint {
        geodesic_point(i as f64, self.phase)
    }

    pub fn points(&self) -> impl Iterator<Item = DiskPoint> + '_ {
        (0..=self.len).map(move |i| self.point(i))
    }
}

/// Hyperbolic rotation by `θ` about `ζ_{n0}`:
/// `Q_θ = T_{ζ_n0}^{-1} ∘ (z ↦ e^{iθ} z) ∘ T_{ζ_n0}`.
pub fn rotate_about(theta: f64, n0: f64, z: DiskPoint) -> DiskPoint {
    let c = zeta(n0);
    mobius_inv(c, mobius(c, z).rotate(theta))
}

/// Whether `{Q_θ(ζ_j) : j = n0, n0 + 1, ..., <= j_max}` lies in the wedge
/// `|arg z| <= e^{-n0} / 2`.
pub fn wedge_check(theta: f64, n0: f64, j_max: f64) -> bool {
    let half_width = 0.5 * (-n0).exp();
    let mut j = n0;
    while j <= j_max + 1e-12 {
        let p = rotate_about(theta, n0, zeta(j));
        if !p.is_origin() && p.arg().abs() > half_width {
            return false;
        }
        j += 1.0;
    }
    true
}

/// Branching approximation of the distance between `ζ_h` and `e^{iθ} ζ_j`:
/// `h + j - 2 min{-log|sin(θ/2)|, h, j}`.
pub fn branching_distance(h: f64, j: f64, theta: f64) -> f64 {
    let split = -(0.5 * theta).sin().abs().ln();
    h + j - 2.0 * split.min(h).min(j)
}

/// `cosh d(ζ_h, e^{iθ} ζ_j)` by the hyperbolic law of cosines.
pub fn law_of_cosines(h: f64, j: f64, theta: f64) -> f64 {
    0.5 * (h + j).cosh() * (1.0 - theta.cos()) + 0.5 * (h - j).cosh() * (1.0 + theta.cos())
}
