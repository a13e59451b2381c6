use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

use super::PhaseVector;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this length products are formed by schoolbook convolution.
const NAIVE_CUTOFF: usize = 64;

/// `det(1 - zU) = Σ_k c_k z^k`, stored as `e^{log_scale} * coeffs` with
/// `max |coeffs| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coeffs: Vec<Complex64>,
    pub log_scale: f64,
}

fn renormalize(mut c: Vec<Complex64>, log_scale: f64) -> CharPoly {
    let m = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m > 0.0 && m.is_finite() {
        let inv = 1.0 / m;
        c.iter_mut().for_each(|z| *z *= inv);
        CharPoly { coeffs: c, log_scale: log_scale + m.ln() }
    } else {
        CharPoly { coeffs: c, log_scale }
    }
}

fn convolve(a: &[Complex64], b: &[Complex64], planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let n = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= NAIVE_CUTOFF {
        let mut out = vec![ZERO; n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = n.next_power_of_two();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa = a.to_vec();
    fa.resize(size, ZERO);
    let mut fb = b.to_vec();
    fb.resize(size, ZERO);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y);
    inv.process(&mut fa);
    let s = 1.0 / size as f64;
    fa.truncate(n);
    fa.iter_mut().for_each(|x| *x *= s);
    fa
}

impl CharPoly {
    pub fn one() -> Self {
        CharPoly { coeffs: vec![ONE], log_scale: 0.0 }
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        renormalize(coeffs, 0.0)
    }

    /// `∏(1 - z e^{iθ_h})` by a balanced product tree. Each subtree takes every
    /// other phase of the sorted list so its roots stay spread over the circle,
    /// and every level is renormalised.
    pub fn from_phases(phases: &PhaseVector) -> Self {
        let mut sorted = phases.phases().to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut planner = FftPlanner::new();
        Self::tree(&sorted, &mut planner)
    }

    fn tree(phases: &[f64], planner: &mut FftPlanner<f64>) -> Self {
        match phases.len() {
            0 => Self::one(),
            1 => CharPoly { coeffs: vec![ONE, -Complex64::from_polar(1.0, phases[0])], log_scale: 0.0 },
            _ => {
                let even: Vec<f64> = phases.iter().step_by(2).copied().collect();
                let odd: Vec<f64> = phases.iter().skip(1).step_by(2).copied().collect();
                let a = Self::tree(&even, planner);
                let b = Self::tree(&odd, planner);
                renormalize(convolve(&a.coeffs, &b.coeffs, planner), a.log_scale + b.log_scale)
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `log|P(z)|` by Horner's rule.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        let v = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c);
        v.norm().ln() + self.log_scale
    }

    /// `log|P|` on `radius * e^{2πi(j + offset)/M}`, `j < M`, folding the
    /// coefficients mod `M` and applying one length-`M` transform.
    pub fn log_abs_grid(&self, radius: f64, m: usize, offset: f64) -> Result<Vec<f64>> {
        if !m.is_power_of_two() {
            return Err(Error::Precondition(format!("fft grid size {m} is not a power of two")));
        }
        if !(0.0..=1.0).contains(&radius) {
            return Err(Error::Precondition(format!("fft grid radius {radius} outside [0, 1]")));
        }
        let mut buf = vec![ZERO; m];
        let mut rk = 1.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let tw = if offset == 0.0 { ONE } else { Complex64::from_polar(1.0, 2.0 * PI * offset * k as f64 / m as f64) };
            buf[k % m] += c * tw * rk;
            rk *= radius;
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        Ok(buf.iter().map(|v| v.norm().ln() + self.log_scale).collect())
    }

    /// Power sums `p_k = Σ_h e^{ikθ_h}`, `k = 1..=kmax`, via Newton's identities
    /// on `log P(z) = -Σ p_k z^k / k`.
    pub fn power_sums(&self, kmax: usize) -> Vec<Complex64> {
        let c0 = self.coeffs[0];
        let c: Vec<Complex64> = (0..=kmax).map(|k| self.coeffs.get(k).map_or(ZERO, |&x| x / c0)).collect();
        // l[k] = k * L_k where log P = Σ L_k z^k
        let mut l = vec![ZERO; kmax + 1];
        for k in 1..=kmax {
            let mut s = c[k] * k as f64;
            for j in 1..k {
                s -= l[j] * c[k - j];
            }
            l[k] = s;
        }
        l[1..].iter().map(|&x| -x).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cue::HaarSampler;

    #[test]
    fn tree_matches_direct_product() {
        // monomial coefficients of a CUE spectrum stay O(1); clustered roots would not
        let pv = crate::cue::QrSampler.sample_phases(200, &mut crate::rng::from_seed(3));
        let phases = pv.phases().to_vec();
        let p = CharPoly::from_phases(&pv);
        assert_eq!(p.degree(), 200);
        for &z in &[Complex64::new(0.3, 0.5), Complex64::new(-0.9, 0.1), Complex64::from_polar(0.99, 2.0)] {
            let direct: f64 = phases.iter().map(|&t| (ONE - z * Complex64::from_polar(1.0, t)).norm().ln()).sum();
            assert!((p.log_abs(z) - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{} {}", p.log_abs(z), direct);
        }
    }

    #[test]
    fn power_sums_of_two_phases() {
        let pv = PhaseVector::new(vec![0.4, -1.1]).unwrap();
        let p = CharPoly::from_phases(&pv);
        for (k, s) in p.power_sums(6).iter().enumerate() {
            let k = (k + 1) as f64;
            let expect = Complex64::from_polar(1.0, 0.4 * k) + Complex64::from_polar(1.0, -1.1 * k);
            assert!((s - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_folds_high_degree() {
        let pv = PhaseVector::new((0..40).map(|i| -3.0 + 0.15 * i as f64).collect()).unwrap();
        let p = CharPoly::from_phases(&pv);
        let g = p.log_abs_grid(0.8, 16, 0.5).unwrap();
        for (j, v) in g.iter().enumerate() {
            let z = Complex64::from_polar(0.8, 2.0 * PI * (j as f64 + 0.5) / 16.0);
            assert!((v - p.log_abs(z)).abs() < 1e-10);
        }
        assert!(p.log_abs_grid(0.8, 12, 0.0).is_err());
    }
}
