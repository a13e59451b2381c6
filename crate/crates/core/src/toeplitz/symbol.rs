use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gaussian_field::BiasSpec;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Target size of the dropped geometric tail in [`fourier_coeffs`].
const SERIES_TAIL: f64 = 1e-18;

/// `f(ω) = p(ω) ω^{-k} / (U(1/ω) V(ω))` with `U(x) = ∏(1 - a_j x)`,
/// `V(x) = ∏(1 - b_i x)` and `p(x) = lead ∏(x - c_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSymbol {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub lead: Complex64,
    pub p_roots: Vec<Complex64>,
    pub k: usize,
}

impl RationalSymbol {
    pub fn new(
        a: Vec<Complex64>,
        b: Vec<Complex64>,
        lead: Complex64,
        p_roots: Vec<Complex64>,
        k: usize,
    ) -> Result<Self> {
        if let Some(z) = a.iter().chain(&b).find(|z| !(z.norm() < 1.0)) {
            return Err(Error::OutsideDisk { re: z.re, im: z.im });
        }
        if lead == ZERO {
            return Err(Error::Precondition("numerator leading coefficient is zero".into()));
        }
        let sym = RationalSymbol { a, b, lead, p_roots, k };
        if sym.a.iter().any(|&aj| sym.p(aj) == ZERO) {
            return Err(Error::Precondition("numerator vanishes at a denominator root a_j".into()));
        }
        Ok(sym)
    }

    /// The symbol `1/(U(1/ω)V(ω))` with constant numerator.
    pub fn cauchy(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        Self::new(a, b, ONE, Vec::new(), 0)
    }

    /// `∏_z |1 - zω|^2 / ∏_y |1 - yω|^2`, whose Toeplitz determinant is
    /// `E e^{B(U)}`. Points at the origin contribute nothing and are dropped.
    pub fn from_bias(bias: &BiasSpec) -> Result<Self> {
        if bias.lambda() != 1.0 {
            return Err(Error::InvalidBias("rational symbols need λ = 1".into()));
        }
        let z: Vec<Complex64> = bias.plus().iter().filter(|p| !p.is_origin()).map(|p| p.z()).collect();
        let y: Vec<Complex64> = bias.minus().iter().filter(|p| !p.is_origin()).map(|p| p.z()).collect();
        let mut roots = Vec::with_capacity(2 * z.len());
        let mut lead = ONE;
        for &zi in &z {
            roots.push(ONE / zi);
            roots.push(zi.conj());
            lead *= -zi;
        }
        Self::new(y.iter().map(|v| v.conj()).collect(), y, lead, roots, z.len())
    }

    pub fn p(&self, x: Complex64) -> Complex64 {
        self.p_roots.iter().fold(self.lead, |acc, &c| acc * (x - c))
    }

    pub fn u(&self, x: Complex64) -> Complex64 {
        self.a.iter().fold(ONE, |acc, &aj| acc * (ONE - aj * x))
    }

    pub fn v(&self, x: Complex64) -> Complex64 {
        self.b.iter().fold(ONE, |acc, &bi| acc * (ONE - bi * x))
    }

    /// Ascending coefficients of `p`.
    pub fn p_coeffs(&self) -> Vec<Complex64> {
        let mut c = vec![self.lead];
        for &r in &self.p_roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] -= r * ci;
                next[i + 1] += ci;
            }
            c = next;
        }
        c
    }

    /// `f(e^{iθ})`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, theta);
        self.p(w) * w.powi(-(self.k as i32)) / (self.u(w.inv()) * self.v(w))
    }

    /// A random instance with `ℓ <= max_l`, `m <= max_m`, `k <= max_k`, every root
    /// (denominator and numerator) uniform in the disk of radius `radius`, and all
    /// roots pairwise at least `sep` apart.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_l: usize, max_m: usize, max_k: usize, radius: f64, sep: f64) -> Self {
        loop {
            let l = rng.random_range(0..=max_l);
            let m = rng.random_range(0..=max_m);
            let k = rng.random_range(0..=max_k);
            let mut pts: Vec<Complex64> = Vec::with_capacity(l + m + 2 * k);
            let mut tries = 0;
            while pts.len() < l + m + 2 * k && tries < 1000 {
                tries += 1;
                let z = Complex64::from_polar(radius * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
                if pts.iter().all(|w| (w - z).norm() >= sep) {
                    pts.push(z);
                }
            }
            if pts.len() < l + m + 2 * k {
                continue;
            }
            let lead = Complex64::from_polar(0.5 + rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
            let c = pts.split_off(l + m);
            let b = pts.split_off(l);
            if let Ok(sym) = Self::new(pts, b, lead, c, k) {
                return sym;
            }
        }
    }

    /// `N + k >= ℓ` and `N + 3k >= ℓ + m + 2`, under which [`corrected_det`](super::corrected_det) applies.
    pub fn corrected_applies(&self, n: usize) -> bool {
        let (l, m, k) = (self.a.len(), self.b.len(), self.k);
        n + k >= l && n + 3 * k >= l + m + 2
    }
}

/// Taylor coefficients of `∏ 1/(1 - r x)` up to `x^{len-1}`.
fn geometric_product(roots: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut c = vec![ZERO; len];
    c[0] = ONE;
    for &r in roots {
        for n in 1..len {
            let prev = c[n - 1];
            c[n] += r * prev;
        }
    }
    c
}

fn series_len(sym: &RationalSymbol) -> usize {
    let rho = sym.a.iter().chain(&sym.b).map(|z| z.norm()).fold(0.0, f64::max);
    if rho == 0.0 {
        return 1;
    }
    let mult = sym.a.len().max(sym.b.len()) as i32;
    let mut len = 16usize;
    while rho.powi(len as i32) * ((len + 1) as f64).powi(mult) / (1.0 - rho) > SERIES_TAIL && len < 1 << 20 {
        len += len / 2;
    }
    len
}

/// `f̂(n)` for `n` in `lags`, by convolving the geometric expansions of the
/// denominator factors with the numerator coefficients.
pub fn fourier_coeffs(sym: &RationalSymbol, lags: RangeInclusive<i64>) -> Vec<Complex64> {
    let len = series_len(sym);
    let aa = geometric_product(&sym.a, len); // coefficient of ω^{-j}
    let bb = geometric_product(&sym.b, len); // coefficient of ω^{i}
    let g = |m: i64| -> Complex64 {
        if m >= 0 {
            let m = m as usize;
            if m >= len {
                return ZERO;
            }
            bb[m..].iter().zip(&aa).map(|(x, y)| x * y).sum()
        } else {
            let m = (-m) as usize;
            if m >= len {
                return ZERO;
            }
            aa[m..].iter().zip(&bb).map(|(x, y)| x * y).sum()
        }
    };
    let pc = sym.p_coeffs();
    lags.map(|n| pc.iter().enumerate().map(|(d, &c)| c * g(n - d as i64 + sym.k as i64)).sum()).collect()
}
