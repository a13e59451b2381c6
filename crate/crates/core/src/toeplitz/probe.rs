use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::gaussian_field::BiasSpec;
use crate::geometry::{geodesic_point, DiskPoint};
use crate::linalg::complex_det;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest `N` accepted by [`cf_probe`].
pub const CF_PROBE_MAX_N: usize = 16;
const QUAD_START: usize = 1 << 12;
const QUAD_MAX: usize = 1 << 20;
const QUAD_TOL: f64 = 1e-10;

/// `φ(ξ) = E exp(i Σ ξ_{h,j} U(ζ_h ω_j) + B(U))`; `xi[h - 1][j]` pairs with `ζ_h ω_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFnProbe {
    pub xi: Vec<Vec<f64>>,
    pub phases: Vec<Complex64>,
    pub bias: BiasSpec,
}

impl CharFnProbe {
    pub fn new(xi: Vec<Vec<f64>>, phases: Vec<Complex64>, bias: BiasSpec) -> Result<Self> {
        if xi.iter().any(|row| row.len() != phases.len()) {
            return Err(Error::Precondition("each ξ row needs one entry per ray".into()));
        }
        Ok(CharFnProbe { xi, phases, bias })
    }

    pub fn depth(&self) -> usize {
        self.xi.len()
    }

    /// `(ζ_h ω_j, ξ_{h,j})` for every probed point.
    pub fn weighted_points(&self) -> Vec<(DiskPoint, f64)> {
        let mut out = Vec::new();
        for (h, row) in self.xi.iter().enumerate() {
            for (&w, &x) in self.phases.iter().zip(row) {
                out.push((geodesic_point((h + 1) as f64, w), x));
            }
        }
        out
    }

    /// `d <= log N - m log log N`.
    pub fn in_regime(&self, n: usize, m: f64) -> bool {
        let l = (n as f64).ln();
        (self.depth() as f64) <= l - m * l.ln()
    }

    fn symbol(&self, theta: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, theta);
        let log_abs = |z: DiskPoint| 0.5 * (Complex64::new(1.0, 0.0) - z.z() * e).norm_sqr().ln();
        let re: f64 = self.bias.apply(log_abs);
        let im: f64 = self.weighted_points().iter().map(|&(z, x)| x * log_abs(z)).sum();
        Complex64::new(re, im).exp()
    }
}

fn quadrature_coeffs(probe: &CharFnProbe, nodes: usize, max_lag: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = (0..nodes).map(|j| probe.symbol(2.0 * PI * j as f64 / nodes as f64)).collect();
    FftPlanner::new().plan_fft_forward(nodes).process(&mut buf);
    let s = 1.0 / nodes as f64;
    // lags -max_lag..=max_lag
    (0..=2 * max_lag).map(|i| buf[(i + nodes - max_lag) % nodes] * s).collect()
}

/// Toeplitz determinant of the (non-rational) probe symbol, with Fourier
/// coefficients from trapezoidal quadrature checked by node doubling.
pub fn cf_probe(probe: &CharFnProbe, n: usize) -> Result<Complex64> {
    if n == 0 || n > CF_PROBE_MAX_N {
        return Err(Error::Precondition(format!("cf_probe needs 1 <= N <= {CF_PROBE_MAX_N}, got {n}")));
    }
    let lag = n - 1;
    let mut nodes = QUAD_START;
    let mut coarse = quadrature_coeffs(probe, nodes, lag);
    let coeffs = loop {
        let fine = quadrature_coeffs(probe, 2 * nodes, lag);
        let diff = coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if diff <= QUAD_TOL {
            break fine;
        }
        nodes *= 2;
        if 2 * nodes > QUAD_MAX {
            return Err(Error::Quadrature { diff, tol: QUAD_TOL });
        }
        coarse = fine;
    };
    let t = DMatrix::from_fn(n, n, |i, j| coeffs[j + lag - i]);
    Ok(complex_det(&t).det)
}

/// Stated bound and measured size of the Taylor remainder of `e^{-iL}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationTail {
    /// `sinh(Σ|ξ|) (r ζ_d)^A`.
    pub bound: f64,
    /// `sup_{|x| = r} |Σ_{n >= A} e_n x^n|` over 1024 points.
    pub empirical: f64,
}

const TAIL_GRID: usize = 1 << 10;

/// Remainder after degree `A - 1` of `e^{-iL(x)}`, `L(x) = Σ ξ_{h,j} log(1 - ζ_h ω_j x) / 2`.
pub fn truncation_tail(probe: &CharFnProbe, r: f64, a: usize) -> Result<TruncationTail> {
    let d = probe.depth();
    let zeta_d = if d == 0 { 0.0 } else { (0.5 * d as f64).tanh() };
    let q = r * zeta_d;
    if !(q < 1.0) || r < 0.0 {
        return Err(Error::Precondition(format!("need 0 <= r ζ_d < 1, got {q}")));
    }
    let total: f64 = probe.xi.iter().flatten().map(|x| x.abs()).sum();
    let bound = total.sinh() * q.powi(a as i32);
    if total == 0.0 {
        return Ok(TruncationTail { bound, empirical: 0.0 });
    }
    // -iL(x) = Σ_k s_k x^k with s_k = (i / 2k) Σ ξ (ζω)^k; work with s_k r^k
    let pts = probe.weighted_points();
    let terms = {
        let extra = ((1e-40f64).ln() / q.ln()).ceil().max(0.0) as usize;
        (a + extra + 8).min(a + (1 << 16))
    };
    let mut s = vec![ZERO; terms + 1];
    for (k, sk) in s.iter_mut().enumerate().skip(1) {
        let sum: Complex64 = pts.iter().map(|&(z, x)| (z.z() * r).powi(k as i32) * x).sum();
        *sk = Complex64::new(0.0, 0.5 / k as f64) * sum;
    }
    // e_n = (1/n) Σ_{k=1}^n k s_k e_{n-k}
    let mut e = vec![ZERO; terms + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for nn in 1..=terms {
        let mut acc = ZERO;
        for k in 1..=nn {
            acc += s[k] * e[nn - k] * k as f64;
        }
        e[nn] = acc / nn as f64;
    }
    let mut buf = vec![ZERO; TAIL_GRID];
    for (nn, &c) in e.iter().enumerate().skip(a) {
        buf[nn % TAIL_GRID] += c;
    }
    FftPlanner::new().plan_fft_inverse(TAIL_GRID).process(&mut buf);
    let empirical = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(TruncationTail { bound, empirical })
}
