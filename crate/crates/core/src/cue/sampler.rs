use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::registry::Registry;
use crate::rng::StreamRng;

use super::{CharPoly, PhaseVector};

/// A sampler of Haar-distributed unitary spectra.
pub trait HaarSampler: Send + Sync {
    fn name(&self) -> &'static str;

    fn sample_phases(&self, n: usize, rng: &mut StreamRng) -> PhaseVector;

    /// `det(1 - zU)` for a fresh sample.
    fn sample_char_poly(&self, n: usize, rng: &mut StreamRng) -> CharPoly {
        CharPoly::from_phases(&self.sample_phases(n, rng))
    }
}

/// Registered samplers: `qr` and `verblunsky`.
pub fn haar_samplers() -> Registry<dyn HaarSampler> {
    Registry::new("haar sampler")
        .register("qr", || Box::new(QrSampler) as Box<dyn HaarSampler>)
        .register("verblunsky", || Box::new(VerblunskySampler) as Box<dyn HaarSampler>)
}

fn eigenphases(m: DMatrix<Complex64>) -> PhaseVector {
    let eig = m.schur().eigenvalues().expect("complex Schur form is triangular");
    PhaseVector::from_unit(eig.iter().copied())
}

/// QR of a complex Ginibre matrix, columns rotated by the phases of `diag R`.
#[derive(Debug, Default, Clone, Copy)]
pub struct QrSampler;

impl QrSampler {
    pub fn sample_matrix(&self, n: usize, rng: &mut StreamRng) -> DMatrix<Complex64> {
        let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..n {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            q.column_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
        q
    }
}

impl HaarSampler for QrSampler {
    fn name(&self) -> &'static str {
        "qr"
    }

    fn sample_phases(&self, n: usize, rng: &mut StreamRng) -> PhaseVector {
        eigenphases(self.sample_matrix(n, rng))
    }
}

/// Independent Verblunsky coefficients with the `β = 2` laws, fed through the
/// Szegő recursion to give the characteristic polynomial directly.
#[derive(Debug, Default, Clone, Copy)]
pub struct VerblunskySampler;

impl VerblunskySampler {
    /// `α_0..α_{N-1}`: `|α_k|^2 ~ Beta(1, N-k-1)` with uniform phase, and
    /// `α_{N-1}` uniform on the circle.
    pub fn coefficients(&self, n: usize, rng: &mut StreamRng) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>());
                if k + 1 == n {
                    phase
                } else {
                    let u: f64 = rng.random();
                    let gap = u.powf(1.0 / (n - k - 1) as f64);
                    phase * (1.0 - gap).sqrt()
                }
            })
            .collect()
    }

    /// Coefficients of `Φ_N` and `Φ_N^*` (ascending powers).
    pub fn szego(alpha: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = alpha.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut phi = vec![zero; n + 1];
        let mut star = vec![zero; n + 1];
        phi[0] = Complex64::new(1.0, 0.0);
        star[0] = phi[0];
        for (k, &a) in alpha.iter().enumerate() {
            // Φ_{k+1} = zΦ_k - conj(α) Φ_k^*,  Φ_{k+1}^* = Φ_k^* - α zΦ_k
            let ac = a.conj();
            for i in (0..=k + 1).rev() {
                let zphi = if i > 0 { phi[i - 1] } else { zero };
                let (p, s) = (zphi - ac * star[i], star[i] - a * zphi);
                phi[i] = p;
                star[i] = s;
            }
        }
        (phi, star)
    }

    /// `log|det(1 - zU)| = log|Φ_N^*(conj z)|` by running the recursion at one
    /// point, `O(N)` per point.
    pub fn log_abs_det(alpha: &[Complex64], z: Complex64) -> f64 {
        let w = z.conj();
        let (mut phi, mut star) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let mut log_scale = 0.0;
        for &a in alpha {
            let wphi = w * phi;
            (phi, star) = (wphi - a.conj() * star, star - a * wphi);
            let m = phi.norm().max(star.norm());
            if !(1e-150..=1e150).contains(&m) && m > 0.0 {
                phi /= m;
                star /= m;
                log_scale += m.ln();
            }
        }
        star.norm().ln() + log_scale
    }

    /// `det(1 - zU) = conj(Φ_N^*(conj z))`.
    pub fn char_poly_from(alpha: &[Complex64]) -> CharPoly {
        let (_, star) = Self::szego(alpha);
        CharPoly::from_coeffs(star.iter().map(|c| c.conj()).collect())
    }
}

impl HaarSampler for VerblunskySampler {
    fn name(&self) -> &'static str {
        "verblunsky"
    }

    /// Roots of `Φ_N` through its companion matrix; only meant for small `N`.
    fn sample_phases(&self, n: usize, rng: &mut StreamRng) -> PhaseVector {
        let (phi, _) = Self::szego(&self.coefficients(n, rng));
        let lead = phi[n];
        let comp = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -phi[i] / lead
            } else if i == j + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        eigenphases(comp)
    }

    fn sample_char_poly(&self, n: usize, rng: &mut StreamRng) -> CharPoly {
        Self::char_poly_from(&self.coefficients(n, rng))
    }
}
