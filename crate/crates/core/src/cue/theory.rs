use num_complex::Complex64;

const SERIES_TOL: f64 = 1e-12;

/// `Cov(U(z), U(w)) = ½ Σ_k min(k, N) Re((z conj w)^k) / k^2` for Haar `U`.
pub fn u_covariance(n: usize, z: Complex64, w: Complex64) -> f64 {
    let q = z * w.conj();
    let r = q.norm();
    if r >= 1.0 - 1e-15 && (q - 1.0).norm() < 1e-15 {
        // on the circle: ½(H_{N} + N Σ_{k>N} 1/k^2)
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let m = (n + 1) as f64;
        let tail = 1.0 / m + 0.5 / (m * m) + 1.0 / (6.0 * m * m * m) - 1.0 / (30.0 * m.powi(5));
        return 0.5 * (h + n as f64 * tail);
    }
    let mut s = 0.0;
    let mut qk = Complex64::new(1.0, 0.0);
    let mut k = 1usize;
    loop {
        qk *= q;
        let kf = k as f64;
        s += k.min(n) as f64 * qk.re / (kf * kf);
        // remaining tail is at most N r^k / (k^2 (1 - r)), or r^k/(k(1-r)) when k < N
        let tail = k.min(n) as f64 * r.powi(k as i32) / (kf * kf * (1.0 - r).max(1e-300));
        if tail < SERIES_TOL || qk.norm() == 0.0 {
            break;
        }
        k += 1;
        if k > 10_000_000 {
            break;
        }
    }
    0.5 * s
}

/// `Var U(z)`.
pub fn u_variance(n: usize, z: Complex64) -> f64 {
    u_covariance(n, z, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_eigenvalue_variance() {
        // N = 1: Var log|1 - r e^{iθ}| = ½ Σ r^{2k}/k^2 = Li_2(r^2)/2
        let v = u_variance(1, Complex64::new(0.5, 0.0));
        let li2: f64 = (1..200).map(|k| 0.25f64.powi(k) / (k * k) as f64).sum();
        assert!((v - 0.5 * li2).abs() < 1e-13);
    }

    #[test]
    fn large_n_tends_to_gaussian_kernel() {
        let z = Complex64::new(0.6, 0.2);
        let v = u_variance(100_000, z);
        assert!((v + 0.5 * (1.0 - z.norm_sqr()).ln()).abs() < 1e-10);
    }

    #[test]
    fn circle_variance_closed_form() {
        let n = 50;
        let direct: f64 = (1..2_000_000usize).map(|k| k.min(n) as f64 / (k * k) as f64).sum::<f64>() * 0.5;
        let v = u_variance(n, Complex64::new(1.0, 0.0));
        assert!((v - direct).abs() < 1e-4, "{v} {direct}");
    }
}
