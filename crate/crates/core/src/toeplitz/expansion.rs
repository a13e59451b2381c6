use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian_field::{exp_moment_gaussian, BiasSpec};
use crate::geometry::{hyp_dist, hyp_norm, mobius_c, DiskPoint};
use crate::stats::CompensatedSum;

use super::det::subsets;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One summand of `E e^{B(U)} / E e^{B(G)}`, indexed by subsets of the plus points.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTerm {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub c_y: Complex64,
    pub c_z: Complex64,
    /// `(-1)^{|S1|} ∏_{S1} z^N ∏_{S2} conj(z)^N c^y c_z`.
    pub value: Complex64,
}

fn nonzero_points(bias: &BiasSpec) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if bias.lambda() != 1.0 {
        return Err(Error::InvalidBias("the subset expansion needs λ = 1".into()));
    }
    let z: Vec<Complex64> = bias.plus().iter().filter(|p| !p.is_origin()).map(|p| p.z()).collect();
    let mut y: Vec<Complex64> = bias.minus().iter().filter(|p| !p.is_origin()).map(|p| p.z()).collect();
    if y.len() > z.len() {
        return Err(Error::InvalidBias("more nonzero minus points than nonzero plus points".into()));
    }
    y.resize(z.len(), Complex64::new(0.0, 0.0));
    Ok((z, y))
}

/// All terms with `|S1| = |S2|`; the `(∅, ∅)` term is first and equals 1.
///
/// `c^y = ∏_{z ∈ S1, y} T_y(z) ∏_{z ∈ S2, y} conj(T_y(z))`, with `y` padded by zeros,
/// and `c_z = ∏_{z,w}(1 - z w̄) / [∏_{z∈S1,w∉S1}(z - w) ∏_{z∈S1,w∈S2}(1 - z w̄)
///   ∏_{z∉S2,w∉S1}(1 - w z̄) ∏_{z∉S2,w∈S2}(w̄ - z̄)]`.
pub fn bias_expansion(bias: &BiasSpec, n: usize) -> Result<Vec<ExpansionTerm>> {
    let (z, y) = nonzero_points(bias)?;
    let k = z.len();
    let log_ty: Vec<Complex64> = z.iter().map(|&zi| y.iter().map(|&yj| mobius_c(yj, zi).ln()).sum()).collect();
    let log_num: Complex64 = z.iter().flat_map(|&a| z.iter().map(move |&b| (ONE - a * b.conj()).ln())).sum();
    let log_zn: Vec<Complex64> = z.iter().map(|&zi| zi.ln() * n as f64).collect();

    let mut terms = Vec::new();
    for s in 0..=k {
        let choices = subsets(k, s);
        for s1 in &choices {
            let in1: Vec<bool> = (0..k).map(|i| s1.contains(&i)).collect();
            for s2 in &choices {
                let in2: Vec<bool> = (0..k).map(|i| s2.contains(&i)).collect();
                let mut log_cy = Complex64::new(0.0, 0.0);
                let mut log_pow = Complex64::new(0.0, 0.0);
                for &i in s1 {
                    log_cy += log_ty[i];
                    log_pow += log_zn[i];
                }
                for &i in s2 {
                    log_cy += log_ty[i].conj();
                    log_pow += log_zn[i].conj();
                }
                let mut log_den = Complex64::new(0.0, 0.0);
                for i in (0..k).filter(|&i| in1[i]) {
                    for w in (0..k).filter(|&w| !in1[w]) {
                        log_den += (z[i] - z[w]).ln();
                    }
                    for w in (0..k).filter(|&w| in2[w]) {
                        log_den += (ONE - z[i] * z[w].conj()).ln();
                    }
                }
                for i in (0..k).filter(|&i| !in2[i]) {
                    for w in (0..k).filter(|&w| !in1[w]) {
                        log_den += (ONE - z[w] * z[i].conj()).ln();
                    }
                    for w in (0..k).filter(|&w| in2[w]) {
                        log_den += (z[w].conj() - z[i].conj()).ln();
                    }
                }
                let log_cz = log_num - log_den;
                let sgn = if s % 2 == 0 { 1.0 } else { -1.0 };
                terms.push(ExpansionTerm {
                    s1: s1.clone(),
                    s2: s2.clone(),
                    c_y: log_cy.exp(),
                    c_z: log_cz.exp(),
                    value: (log_pow + log_cy + log_cz).exp() * sgn,
                });
            }
        }
    }
    Ok(terms)
}

/// Largest `|c_z|` among the terms; large values flag nearly coincident plus points.
pub fn max_abs_cz(terms: &[ExpansionTerm]) -> f64 {
    terms.iter().map(|t| t.c_z.norm()).fold(0.0, f64::max)
}

/// `Σ_terms value = E e^{B(U)} / E e^{B(G)}`.
pub fn expansion_ratio(bias: &BiasSpec, n: usize) -> Result<Complex64> {
    let mut acc = CompensatedSum::default();
    for t in bias_expansion(bias, n)? {
        acc.add(t.value);
    }
    Ok(acc.value())
}

/// `E e^{B(U)}` for `U` the CUE field of an `N x N` matrix.
pub fn exp_moment_cue(bias: &BiasSpec, n: usize) -> Result<f64> {
    let ratio = expansion_ratio(bias, n)?;
    if ratio.im.abs() > 1e-6 * ratio.norm().max(1e-300) {
        return Err(Error::Overflow(format!("expansion lost accuracy: imaginary residue {:e}", ratio.im)));
    }
    Ok(exp_moment_gaussian(bias)? * ratio.re)
}

/// Size parameters controlling the expansion's corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBound {
    pub delta: f64,
    /// Same maximum with the split point removed; equals `delta` when no split is given.
    pub delta_prime: f64,
    /// `1 - |w|^{2N} ∏_y tanh^2(d(w,y)/2) / ∏_{z ≠ w} tanh^2(d(w,z)/2)`, with `y`
    /// padded by zeros, when a split point `w` is given.
    pub first_correction: Option<f64>,
}

fn delta_over(plus: &[DiskPoint], skip: Option<usize>, n: usize) -> f64 {
    (0..plus.len())
        .filter(|&i| Some(i) != skip)
        .map(|i| {
            let z = plus[i];
            let mut v = (-(n as f64) * (-hyp_norm(z)).exp()).exp();
            for (j, &x) in plus.iter().enumerate() {
                if j != i {
                    v /= (0.5 * hyp_dist(x, z)).tanh();
                }
            }
            v
        })
        .fold(0.0, f64::max)
}

/// `Δ = max_z e^{-N e^{-d(0,z)}} ∏_{x ≠ z} coth(d(x,z)/2)` over the plus points,
/// and the split-point quantities when `w` (one of the plus points) is given.
pub fn delta_bound(bias: &BiasSpec, n: usize, w: Option<DiskPoint>) -> Result<DeltaBound> {
    let plus = bias.plus();
    let delta = delta_over(plus, None, n);
    let Some(w) = w else {
        return Ok(DeltaBound { delta, delta_prime: delta, first_correction: None });
    };
    let iw = plus
        .iter()
        .position(|&p| p == w)
        .ok_or_else(|| Error::Precondition("split point must be one of the plus points".into()))?;
    let delta_prime = delta_over(plus, Some(iw), n);
    let mut log_r = 2.0 * n as f64 * w.abs().ln();
    let padded = plus.len() - bias.minus().len();
    for &y in bias.minus() {
        log_r += 2.0 * (0.5 * hyp_dist(w, y)).tanh().ln();
    }
    log_r += 2.0 * padded as f64 * w.abs().ln();
    for (j, &z) in plus.iter().enumerate() {
        if j != iw {
            log_r -= 2.0 * (0.5 * hyp_dist(w, z)).tanh().ln();
        }
    }
    Ok(DeltaBound { delta, delta_prime, first_correction: Some(1.0 - log_r.exp()) })
}
