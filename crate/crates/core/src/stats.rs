//! Small statistics toolkit shared by the Monte Carlo routines.

use num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, Normal};

/// Mergeable running mean / variance (Chan et al. pairwise update).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Running second-moment estimator of a covariance from centered samples
/// `E[XY]` (the fields here have known zero mean).
#[derive(Debug, Clone, Copy, Default)]
pub struct CrossMoment {
    prod: Moments,
}

impl CrossMoment {
    pub fn push(&mut self, x: f64, y: f64) {
        self.prod.push(x * y);
    }
    pub fn merge(&mut self, other: &CrossMoment) {
        self.prod.merge(&other.prod);
    }
    pub fn value(&self) -> f64 {
        self.prod.mean
    }
    pub fn std_error(&self) -> f64 {
        self.prod.std_error()
    }
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    // statrs handles the far tails through erfc.
    Normal::standard().cdf(x)
}

/// `P(a <= X <= b)` for `X ~ N(0, var)`.
pub fn normal_window(a: f64, b: f64, var: f64) -> f64 {
    let s = var.sqrt();
    norm_cdf(b / s) - norm_cdf(a / s)
}

/// Two-sided Kolmogorov–Smirnov statistic of `sample` against `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        let lo = f - i as f64 / n;
        let hi = (i + 1) as f64 / n - f;
        d.max(lo).max(hi)
    })
}

/// Asymptotic Kolmogorov p-value for statistic `d` on `n` samples
/// (with the Stephens small-sample correction).
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = 2.0 * (-1.0f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Ordinary least-squares slope and intercept of `y` against `x`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Weighted least-squares slope with its standard error, weights `1/se^2`.
pub fn wls_slope(x: &[f64], y: &[f64], se: &[f64]) -> (f64, f64) {
    let w: Vec<f64> = se.iter().map(|s| 1.0 / (s * s).max(1e-300)).collect();
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(&w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, w)| w * (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).zip(&w).map(|((a, b), w)| w * (a - mx) * (b - my)).sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}

/// Self-normalised importance sampling accumulator for `E_w[f]`, with log-weights
/// stabilised by a running maximum.
#[derive(Debug, Clone, Default)]
pub struct WeightedMeans {
    shift: Option<f64>,
    sum_w: f64,
    sum_w2: f64,
    sum_wf: Vec<f64>,
    sum_w2f: Vec<f64>,
    sum_w2f2: Vec<f64>,
    pub count: u64,
}

impl WeightedMeans {
    pub fn new(dim: usize) -> Self {
        WeightedMeans {
            sum_wf: vec![0.0; dim],
            sum_w2f: vec![0.0; dim],
            sum_w2f2: vec![0.0; dim],
            ..Default::default()
        }
    }

    fn rescale(&mut self, new_shift: f64) {
        if let Some(old) = self.shift {
            let s = (old - new_shift).exp();
            let s2 = s * s;
            self.sum_w *= s;
            self.sum_w2 *= s2;
            self.sum_wf.iter_mut().for_each(|v| *v *= s);
            self.sum_w2f.iter_mut().for_each(|v| *v *= s2);
            self.sum_w2f2.iter_mut().for_each(|v| *v *= s2);
        }
        self.shift = Some(new_shift);
    }

    pub fn push(&mut self, log_w: f64, f: &[f64]) {
        match self.shift {
            Some(s) if log_w <= s => {}
            _ => self.rescale(log_w),
        }
        let w = (log_w - self.shift.unwrap()).exp();
        self.count += 1;
        self.sum_w += w;
        self.sum_w2 += w * w;
        for (i, &v) in f.iter().enumerate() {
            self.sum_wf[i] += w * v;
            self.sum_w2f[i] += w * w * v;
            self.sum_w2f2[i] += w * w * v * v;
        }
    }

    pub fn merge(&mut self, other: &WeightedMeans) {
        let Some(os) = other.shift else { return };
        let mut other = other.clone();
        match self.shift {
            None => {
                *self = other;
                return;
            }
            Some(s) if s >= os => other.rescale(s),
            Some(_) => self.rescale(os),
        }
        self.count += other.count;
        self.sum_w += other.sum_w;
        self.sum_w2 += other.sum_w2;
        for i in 0..self.sum_wf.len() {
            self.sum_wf[i] += other.sum_wf[i];
            self.sum_w2f[i] += other.sum_w2f[i];
            self.sum_w2f2[i] += other.sum_w2f2[i];
        }
    }

    /// Kish effective sample size `(Σw)^2 / Σw^2`.
    pub fn ess(&self) -> f64 {
        if self.sum_w2 == 0.0 {
            0.0
        } else {
            self.sum_w * self.sum_w / self.sum_w2
        }
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.sum_wf[i] / self.sum_w
    }

    /// Delta-method standard error of the ratio estimator.
    pub fn std_error(&self, i: usize) -> f64 {
        let mu = self.mean(i);
        // Σ w^2 (f - mu)^2 / (Σ w)^2
        let num = self.sum_w2f2[i] - 2.0 * mu * self.sum_w2f[i] + mu * mu * self.sum_w2;
        (num.max(0.0)).sqrt() / self.sum_w
    }

    /// `log( mean of exp(log_w) )` over the pushed samples.
    pub fn log_mean_weight(&self) -> f64 {
        self.shift.unwrap_or(0.0) + (self.sum_w / self.count as f64).ln()
    }
}

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, z.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, z.im);
    }
    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}
