use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complex_det, DetReport};

use super::symbol::{fourier_coeffs, RationalSymbol};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest `N` accepted by [`direct_det`].
pub const DIRECT_DET_MAX_N: usize = 64;

/// Roots closer than this are nudged apart before the residue sum.
pub const ROOT_SEPARATION: f64 = 1e-6;

/// `det(f̂(j - i))_{i,j < N}` by pivoted LU, with a condition estimate.
pub fn direct_det(sym: &RationalSymbol, n: usize) -> Result<DetReport> {
    if n == 0 {
        return Ok(DetReport { det: ONE, condition: 1.0 });
    }
    if n > DIRECT_DET_MAX_N {
        return Err(Error::Precondition(format!("direct determinant capped at N={DIRECT_DET_MAX_N}, got {n}")));
    }
    let nn = n as i64;
    let f = fourier_coeffs(sym, -(nn - 1)..=(nn - 1));
    let t = DMatrix::from_fn(n, n, |i, j| f[(j as i64 - i as i64 + nn - 1) as usize]);
    let report = complex_det(&t);
    if !report.det.re.is_finite() || !report.det.im.is_finite() {
        return Err(Error::Overflow(format!("Toeplitz determinant not finite at N={n}")));
    }
    Ok(report)
}

/// `∏_{i,j} 1/(1 - a_j b_i)`, exact for `N >= ℓ` or `N >= m`.
pub fn baxter_det(a: &[Complex64], b: &[Complex64], n: usize) -> Result<Complex64> {
    if n < a.len() && n < b.len() {
        return Err(Error::Precondition(format!("need N >= ℓ={} or N >= m={}, got N={n}", a.len(), b.len())));
    }
    Ok(a.iter().flat_map(|&aj| b.iter().map(move |&bi| ONE / (ONE - aj * bi))).product())
}

/// Result of [`corrected_det_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedDet {
    pub value: Complex64,
    /// Number of numerator roots moved by [`ROOT_SEPARATION`] to separate them.
    pub perturbed: usize,
}

/// Toeplitz determinant of a rational symbol whose numerator has `2k`
/// distinct roots, via the residue expansion.
pub fn corrected_det(sym: &RationalSymbol, n: usize) -> Result<Complex64> {
    corrected_det_detailed(sym, n).map(|r| r.value)
}

fn separate_roots(roots: &[Complex64]) -> Result<(Vec<Complex64>, usize)> {
    let mut out = roots.to_vec();
    let mut moved = 0;
    for i in 0..out.len() {
        for j in 0..i {
            let d = (out[i] - out[j]).norm();
            if d <= 1e-14 * (1.0 + out[i].norm()) {
                return Err(Error::RootCoincidence { i: j, j: i });
            }
            if d < ROOT_SEPARATION {
                let dir = (out[i] - out[j]) / d;
                out[i] += dir * ROOT_SEPARATION;
                moved += 1;
            }
        }
    }
    Ok((out, moved))
}

fn binom2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

fn sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// As [`corrected_det`], also reporting root perturbations.
///
/// `D_N = (-1)^{kN} p(0)^{N+k} ∏_j p(a_j)/(p(0) V(a_j))
///   · Σ_{|S| = k} ∏_{i ∈ S} V(c_i) / (lead c_i^{N+k} U(1/c_i) ∏_{j ∉ S}(c_j - c_i))`.
pub fn corrected_det_detailed(sym: &RationalSymbol, n: usize) -> Result<CorrectedDet> {
    let k = sym.k;
    let (l, m) = (sym.a.len(), sym.b.len());
    if sym.p_roots.len() != 2 * k {
        return Err(Error::Precondition(format!("numerator degree {} must equal 2k = {}", sym.p_roots.len(), 2 * k)));
    }
    if n + k < l || n + 3 * k < l + m + 2 {
        return Err(Error::Precondition(format!("N={n} below the threshold for ℓ={l}, m={m}, k={k}")));
    }
    let (roots, perturbed) = separate_roots(&sym.p_roots)?;
    let sym = RationalSymbol { p_roots: roots, ..sym.clone() };
    let p0 = sym.p(Complex64::new(0.0, 0.0));
    if p0.norm() == 0.0 {
        return Err(Error::Precondition("numerator vanishes at 0".into()));
    }

    // log of the prefactor (-1)^{kN} p(0)^{N+k} ∏ p(a_j)/(p(0)V(a_j))
    let mut log_pref = p0.ln() * (n + k) as f64;
    for &aj in &sym.a {
        log_pref += (sym.p(aj) / (p0 * sym.v(aj))).ln();
    }
    let pref_sign = sign(binom2(k) + k * n) * sign(binom2(k));

    let c = &sym.p_roots;
    let log_single: Vec<Complex64> = c
        .iter()
        .map(|&ci| (sym.v(ci) / (sym.lead * sym.u(ONE / ci))).ln() - ci.ln() * (n + k) as f64)
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for subset in subsets(2 * k, k) {
        let mut lg = log_pref;
        let mut inside = vec![false; 2 * k];
        for &i in &subset {
            inside[i] = true;
        }
        for &i in &subset {
            lg += log_single[i];
            for j in (0..2 * k).filter(|&j| !inside[j]) {
                lg -= (c[j] - c[i]).ln();
            }
        }
        // Neumaier summation
        let term = lg.exp();
        let t = total + term;
        comp += if total.norm() >= term.norm() { (total - t) + term } else { (term - t) + total };
        total = t;
    }
    Ok(CorrectedDet { value: (total + comp) * pref_sign, perturbed })
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}
