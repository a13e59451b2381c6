use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::cholesky_with_ridge;
use crate::stats::Moments;

/// Covariance of the process `Z_1..Z_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessCovariance {
    /// `R(i, j) = i ∧ j`: the Gaussian random walk.
    Walk,
    /// An explicit `n x n` matrix (index 0 is time 1).
    Custom(DMatrix<f64>),
}

/// `B_Z(n, t, h) = {Z_i <= h_i, i < n; Z_n ∈ [t, t + 1]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierProblem {
    pub n: usize,
    /// `h_1..h_{n-1}`.
    pub h: Vec<f64>,
    pub t: f64,
    pub covariance: ProcessCovariance,
}

impl BarrierProblem {
    pub fn new(n: usize, h: Vec<f64>, t: f64, covariance: ProcessCovariance) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("barrier problem needs n >= 1".into()));
        }
        if h.len() != n - 1 {
            return Err(Error::Precondition(format!("barrier has {} entries, expected n - 1 = {}", h.len(), n - 1)));
        }
        if let ProcessCovariance::Custom(m) = &covariance {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Precondition(format!("covariance is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
            }
        }
        Ok(BarrierProblem { n, h, t, covariance })
    }

    /// Constant barrier `h_i = level`.
    pub fn flat(n: usize, level: f64, t: f64, covariance: ProcessCovariance) -> Result<Self> {
        Self::new(n, vec![level; n.saturating_sub(1)], t, covariance)
    }

    /// The same problem with every `h_i` raised by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        BarrierProblem { h: self.h.iter().map(|v| v + delta).collect(), ..self.clone() }
    }

    pub fn with_covariance(&self, covariance: ProcessCovariance) -> Self {
        BarrierProblem { covariance, ..self.clone() }
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        match &self.covariance {
            ProcessCovariance::Walk => walk_covariance(self.n),
            ProcessCovariance::Custom(m) => m.clone(),
        }
    }

    /// Whether the path `z[0..n]` lies in the event.
    pub fn contains(&self, z: &[f64]) -> bool {
        barrier_indicator(z, &self.h, self.t)
    }
}

/// `min(i, j)` with 1-based times.
pub fn walk_covariance(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| (i.min(j) + 1) as f64)
}

/// `z_i <= h_i` for `i < n` and `z_n ∈ [t, t + 1]`.
pub fn barrier_indicator(z: &[f64], h: &[f64], t: f64) -> bool {
    let n = z.len();
    let end = z[n - 1];
    end >= t && end <= t + 1.0 && z[..n - 1].iter().zip(h).all(|(a, b)| a <= b)
}

/// Maps i.i.d. standard normals to paths with a given covariance.
#[derive(Debug, Clone)]
pub enum PathSampler {
    Walk(usize),
    Cholesky(DMatrix<f64>),
}

impl PathSampler {
    pub fn new(cov: &ProcessCovariance, n: usize) -> Result<Self> {
        match cov {
            ProcessCovariance::Walk => Ok(PathSampler::Walk(n)),
            ProcessCovariance::Custom(m) => Ok(PathSampler::Cholesky(cholesky_with_ridge(m)?.0)),
        }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        Ok(PathSampler::Cholesky(cholesky_with_ridge(m)?.0))
    }

    pub fn dim(&self) -> usize {
        match self {
            PathSampler::Walk(n) => *n,
            PathSampler::Cholesky(l) => l.nrows(),
        }
    }

    /// Path driven by the given noise vector.
    pub fn path(&self, xi: &[f64], out: &mut [f64]) {
        match self {
            PathSampler::Walk(_) => {
                let mut s = 0.0;
                for (o, x) in out.iter_mut().zip(xi) {
                    s += x;
                    *o = s;
                }
            }
            PathSampler::Cholesky(l) => {
                let z = l * DVector::from_column_slice(xi);
                out.copy_from_slice(z.as_slice());
            }
        }
    }
}

/// Fills `xi` with standard normals.
pub fn fill_normals<R: Rng + ?Sized>(rng: &mut R, xi: &mut [f64]) {
    xi.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
}

/// A Monte Carlo probability with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MCEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MCEstimate {
    /// Binomial estimate `hits / samples` with `sqrt(p(1 - p)/samples)`.
    pub fn from_hits(hits: u64, samples: u64) -> Self {
        let p = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
        MCEstimate { probability: p, std_error: (p * (1.0 - p) / samples.max(1) as f64).sqrt(), samples }
    }

    /// Mean of per-sample values in `[0, 1]`, with the sample standard error.
    pub fn from_moments(m: &Moments) -> Self {
        MCEstimate { probability: m.mean, std_error: m.std_error(), samples: m.count }
    }

    /// Count-weighted pooling of two binomial estimates.
    pub fn merge(&self, other: &MCEstimate) -> Self {
        let hits = (self.probability * self.samples as f64).round() + (other.probability * other.samples as f64).round();
        Self::from_hits(hits as u64, self.samples + other.samples)
    }

    /// Count-weighted pooling of independent estimates of any kind.
    pub fn pool(parts: &[MCEstimate]) -> Self {
        let total: u64 = parts.iter().map(|e| e.samples).sum();
        let t = total.max(1) as f64;
        let p = parts.iter().map(|e| e.probability * e.samples as f64).sum::<f64>() / t;
        let var = parts.iter().map(|e| (e.samples as f64 / t * e.std_error).powi(2)).sum::<f64>();
        MCEstimate { probability: p, std_error: var.sqrt(), samples: total }
    }
}
