use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;
use crate::linalg::cholesky_with_ridge;
use crate::rng;

use super::kernel::cov_kernel;

/// Default covariance tolerance for the truncated circle series.
pub const DEFAULT_CIRCLE_TOL: f64 = 1e-12;

/// Field heights at a list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub points: Vec<DiskPoint>,
    pub values: Vec<f64>,
}

impl FieldSample {
    pub fn new(points: Vec<DiskPoint>, values: Vec<f64>) -> Self {
        assert_eq!(points.len(), values.len());
        FieldSample { points, values }
    }
}

/// Kernel matrix `Cov(z_i, z_j)` for a point list.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub points: Vec<DiskPoint>,
    pub entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(points: &[DiskPoint]) -> Self {
        let n = points.len();
        let entries = DMatrix::from_fn(n, n, |i, j| cov_kernel(points[i], points[j]));
        CovarianceMatrix { points: points.to_vec(), entries }
    }

    /// Cholesky factor with the smallest ridge that works.
    pub fn factor(&self) -> Result<(DMatrix<f64>, f64)> {
        cholesky_with_ridge(&self.entries)
    }
}

/// Exact sampler for `G` at a fixed point list. The origin is pinned to 0 and
/// kept out of the factorisation.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    points: Vec<DiskPoint>,
    active: Vec<usize>,
    chol: DMatrix<f64>,
    ridge: f64,
}

impl GaussianSampler {
    pub fn new(points: &[DiskPoint]) -> Result<Self> {
        let active: Vec<usize> = (0..points.len()).filter(|&i| !points[i].is_origin()).collect();
        let sub: Vec<DiskPoint> = active.iter().map(|&i| points[i]).collect();
        let (chol, ridge) = CovarianceMatrix::new(&sub).factor()?;
        Ok(GaussianSampler { points: points.to_vec(), active, chol, ridge })
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    /// Ridge added to the diagonal to make the factorisation succeed.
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let m = self.active.len();
        let xi = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let g = &self.chol * xi;
        out.fill(0.0);
        for (k, &i) in self.active.iter().enumerate() {
            out[i] = g[k];
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.points.len()];
        self.sample_into(rng, &mut out);
        out
    }
}

/// One exact draw of `G` at `points`.
pub fn sample_field(points: &[DiskPoint], seed: u64) -> Result<FieldSample> {
    let sampler = GaussianSampler::new(points)?;
    let values = sampler.sample(&mut rng::from_seed(seed));
    Ok(FieldSample::new(points.to_vec(), values))
}

/// Upper bound on the dropped variance `Σ_{k>K} r^{2k} / (2k)`.
pub fn circle_tail_bound(radius: f64, k: usize) -> f64 {
    let q = radius * radius;
    q.powi(k as i32 + 1) / (2.0 * (k + 1) as f64 * (1.0 - q))
}

/// `K = ceil(log(1/tol) / (2 log(1/r)))`.
pub fn truncation_order(radius: f64, tol: f64) -> usize {
    if radius <= 0.0 {
        return 1;
    }
    ((1.0 / tol).ln() / (2.0 * (1.0 / radius).ln())).ceil().max(1.0) as usize
}

/// Truncated-series sampler on the circle of radius `r`:
/// `G(z) = Σ_{k=1}^K Re(z^k g_k) / sqrt(2k)`, `g_k = X_k + i Y_k` with
/// `X_k, Y_k` independent standard normals, evaluated on the `M`-grid by one FFT.
pub struct CircleSampler {
    radius: f64,
    m: usize,
    k: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CircleSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleSampler").field("radius", &self.radius).field("m", &self.m).field("k", &self.k).finish()
    }
}

impl CircleSampler {
    /// Rejects `k` when the dropped variance exceeds `tol`.
    pub fn new(radius: f64, m: usize, k: usize, tol: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius) {
            return Err(Error::OutsideDisk { re: radius, im: 0.0 });
        }
        if m == 0 || k == 0 {
            return Err(Error::Precondition("grid size and truncation must be positive".into()));
        }
        if circle_tail_bound(radius, k) > tol {
            return Err(Error::Truncation { k, tol, radius });
        }
        let fft = FftPlanner::new().plan_fft_inverse(m);
        Ok(CircleSampler { radius, m, k, fft })
    }

    /// Chooses `K` from [`truncation_order`].
    pub fn with_tolerance(radius: f64, m: usize, tol: f64) -> Result<Self> {
        let mut k = truncation_order(radius, tol);
        while circle_tail_bound(radius, k) > tol {
            k += 1;
        }
        Self::new(radius, m, k, tol)
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> Vec<DiskPoint> {
        (0..self.m)
            .map(|j| DiskPoint::polar(self.radius, 2.0 * PI * j as f64 / self.m as f64).expect("radius < 1"))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        let mut rk = 1.0;
        for k in 1..=self.k {
            rk *= self.radius;
            let g = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            buf[k % self.m] += g * (rk / (2.0 * k as f64).sqrt());
        }
        self.fft.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }
}

/// One draw of the truncated circle series.
pub fn sample_circle(radius: f64, m: usize, k: usize, tol: f64, seed: u64) -> Result<FieldSample> {
    let s = CircleSampler::new(radius, m, k, tol)?;
    let values = s.sample(&mut rng::from_seed(seed));
    Ok(FieldSample::new(s.points(), values))
}

/// Independent unit-variance noise at fixed points.
#[derive(Debug, Clone, PartialEq)]
pub struct WhiteNoisePlan {
    pub points: Vec<DiskPoint>,
    pub variance: f64,
}

impl WhiteNoisePlan {
    pub fn new(points: Vec<DiskPoint>) -> Self {
        WhiteNoisePlan { points, variance: 1.0 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let s = self.variance.sqrt();
        self.points.iter().map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect()
    }
}
