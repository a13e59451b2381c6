use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::stats::Moments;

use super::estimators::barrier_shift;
use super::process::{
    barrier_indicator, fill_normals, walk_covariance, BarrierProblem, MCEstimate, PathSampler, ProcessCovariance,
};

/// Paired difference `mean ± std_error` of two indicators on common noise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gap {
    pub mean: f64,
    pub std_error: f64,
}

impl Gap {
    fn from(m: &Moments) -> Self {
        Gap { mean: m.mean, std_error: m.std_error() }
    }

    /// Whether the gap is not negative beyond `z` standard errors.
    pub fn holds(&self, z: f64) -> bool {
        self.mean >= -z * self.std_error
    }
}

/// Monte Carlo check of
/// `(1-ε) p_Y(h - s) <= p_G(h) <= (1+ε) p_Y(h + s)`, `s = (log n)^{3/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub p_g: MCEstimate,
    pub p_y_lower: MCEstimate,
    pub p_y_upper: MCEstimate,
    /// `p_G - (1-ε) p_Y(h - s)`.
    pub lower_gap: Gap,
    /// `(1+ε) p_Y(h + s) - p_G`.
    pub upper_gap: Gap,
    /// Smallest `C_1` making both sides hold at the point estimates.
    pub c1_required: f64,
}

impl SandwichReport {
    pub fn holds(&self, z: f64) -> bool {
        self.lower_gap.holds(z) && self.upper_gap.holds(z)
    }
}

fn additive_scale(n: usize, eps: f64) -> f64 {
    (-(n as f64).ln().powf(1.5 - eps)).exp()
}

/// Runs `G` (the problem's covariance) and the walk `Y` on the same noise.
pub fn slepian_sandwich_check<R: Rng + ?Sized>(
    problem: &BarrierProblem,
    eps: f64,
    samples: u64,
    rng: &mut R,
) -> Result<SandwichReport> {
    let n = problem.n;
    let g = PathSampler::new(&problem.covariance, n)?;
    let y = PathSampler::Walk(n);
    let s = barrier_shift(n);
    let (lo, hi) = (problem.shifted(-s), problem.shifted(s));
    let (mut xi, mut zg, mut zy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut hg, mut hl, mut hu) = (0u64, 0u64, 0u64);
    let (mut lower, mut upper) = (Moments::default(), Moments::default());
    for _ in 0..samples {
        fill_normals(rng, &mut xi);
        g.path(&xi, &mut zg);
        y.path(&xi, &mut zy);
        let ig = f64::from(u8::from(problem.contains(&zg)));
        let il = f64::from(u8::from(lo.contains(&zy)));
        let iu = f64::from(u8::from(hi.contains(&zy)));
        hg += ig as u64;
        hl += il as u64;
        hu += iu as u64;
        lower.push(ig - (1.0 - eps) * il);
        upper.push((1.0 + eps) * iu - ig);
    }
    let (lower_gap, upper_gap) = (Gap::from(&lower), Gap::from(&upper));
    let deficit = (-lower_gap.mean).max(-upper_gap.mean).max(0.0);
    Ok(SandwichReport {
        p_g: MCEstimate::from_hits(hg, samples),
        p_y_lower: MCEstimate::from_hits(hl, samples),
        p_y_upper: MCEstimate::from_hits(hu, samples),
        lower_gap,
        upper_gap,
        c1_required: deficit / additive_scale(n, eps),
    })
}

/// Coupling between the two rays of a [`TwoRaySpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum TwoRayCoupling {
    /// `E G^(1)_i G^(2)_j` given explicitly (bounded).
    Separated { cross: DMatrix<f64> },
    /// Common trunk: `E G^(1)_i G^(2)_j = i ∧ j ∧ k` plus an optional bounded
    /// perturbation, with the extra window `G^(1)_k ∈ [z, z + 1]`.
    Overlap { k: usize, z: f64, perturbation: Option<DMatrix<f64>> },
}

/// Two copies of a barrier problem with a joint law.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRaySpec {
    pub base: BarrierProblem,
    pub coupling: TwoRayCoupling,
}

impl TwoRaySpec {
    pub fn new(base: BarrierProblem, coupling: TwoRayCoupling) -> Result<Self> {
        let n = base.n;
        match &coupling {
            TwoRayCoupling::Separated { cross } if cross.nrows() != n || cross.ncols() != n => {
                return Err(Error::Precondition("cross covariance must be n x n".into()));
            }
            TwoRayCoupling::Overlap { k, .. } if *k == 0 || *k >= n => {
                return Err(Error::Precondition(format!("overlap index {k} outside (0, {n})")));
            }
            _ => {}
        }
        Ok(TwoRaySpec { base, coupling })
    }

    /// The `2n x 2n` joint covariance.
    pub fn joint_covariance(&self) -> DMatrix<f64> {
        let n = self.base.n;
        let r = self.base.covariance_matrix();
        let cross = match &self.coupling {
            TwoRayCoupling::Separated { cross } => cross.clone(),
            TwoRayCoupling::Overlap { k, perturbation, .. } => {
                let mut c = DMatrix::from_fn(n, n, |i, j| (i.min(j) + 1).min(*k) as f64);
                if let Some(p) = perturbation {
                    c += p;
                }
                c
            }
        };
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&r);
        m.view_mut((n, n), (n, n)).copy_from(&r);
        m.view_mut((0, n), (n, n)).copy_from(&cross);
        m.view_mut((n, 0), (n, n)).copy_from(&cross.transpose());
        m
    }

    fn contains(&self, z: &[f64], h: &[f64]) -> bool {
        let n = self.base.n;
        let (a, b) = z.split_at(n);
        let both = barrier_indicator(a, h, self.base.t) && barrier_indicator(b, h, self.base.t);
        match self.coupling {
            TwoRayCoupling::Overlap { k, z: lvl, .. } => both && a[k - 1] >= lvl && a[k - 1] <= lvl + 1.0,
            TwoRayCoupling::Separated { .. } => both,
        }
    }

    /// The comparison pair: walks with the same trunk structure (overlap) or
    /// independent walks (separated).
    pub fn reference(&self) -> TwoRaySpec {
        let base = self.base.with_covariance(ProcessCovariance::Walk);
        let coupling = match &self.coupling {
            TwoRayCoupling::Separated { .. } => TwoRayCoupling::Separated { cross: DMatrix::zeros(base.n, base.n) },
            TwoRayCoupling::Overlap { k, z, .. } => TwoRayCoupling::Overlap { k: *k, z: *z, perturbation: None },
        };
        TwoRaySpec { base, coupling }
    }
}

/// Monte Carlo for the joint two-ray event.
pub fn two_ray_mc<R: Rng + ?Sized>(spec: &TwoRaySpec, samples: u64, rng: &mut R) -> Result<MCEstimate> {
    let sampler = PathSampler::from_matrix(&spec.joint_covariance())?;
    let n2 = 2 * spec.base.n;
    let (mut xi, mut z) = (vec![0.0; n2], vec![0.0; n2]);
    let mut hits = 0;
    for _ in 0..samples {
        fill_normals(rng, &mut xi);
        sampler.path(&xi, &mut z);
        if spec.contains(&z, &spec.base.h) {
            hits += 1;
        }
    }
    Ok(MCEstimate::from_hits(hits, samples))
}

/// Monte Carlo check of the two-ray upper bounds:
/// separated rays against `(1+ε) p_Y(h + s)^2`, overlapping rays against
/// `(1+ε)` times the trunk-walk event with barrier `h + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRayReport {
    pub joint: MCEstimate,
    /// Right-hand side before the `1 + ε` factor.
    pub reference: MCEstimate,
    /// `(1+ε) reference - joint`, with a combined standard error.
    pub gap: Gap,
}

pub fn two_ray_bound_check<R: Rng + ?Sized>(spec: &TwoRaySpec, eps: f64, samples: u64, rng: &mut R) -> Result<TwoRayReport> {
    let s = barrier_shift(spec.base.n);
    let joint = two_ray_mc(spec, samples, rng)?;
    let reference = match &spec.coupling {
        TwoRayCoupling::Separated { .. } => {
            let single = super::estimators::barrier_mc(
                &spec.base.with_covariance(ProcessCovariance::Walk).shifted(s),
                samples,
                rng,
            )?;
            let p = single.probability;
            MCEstimate { probability: p * p, std_error: 2.0 * p * single.std_error, samples }
        }
        TwoRayCoupling::Overlap { .. } => {
            let mut r = spec.reference();
            r.base = r.base.shifted(s);
            two_ray_mc(&r, samples, rng)?
        }
    };
    let mean = (1.0 + eps) * reference.probability - joint.probability;
    let se = ((1.0 + eps).powi(2) * reference.std_error.powi(2) + joint.std_error.powi(2)).sqrt();
    Ok(TwoRayReport { joint, reference, gap: Gap { mean, std_error: se } })
}

/// `i ∧ j + amplitude cos(i - j)`, positive semidefinite for `amplitude >= 0`.
pub fn cosine_perturbed_walk(n: usize, amplitude: f64) -> DMatrix<f64> {
    walk_covariance(n) + DMatrix::from_fn(n, n, |i, j| amplitude * (i as f64 - j as f64).cos())
}
