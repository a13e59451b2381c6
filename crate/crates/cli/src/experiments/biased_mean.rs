//! `biased-mean`: means of `U(ζ_i)` along a ray under the tilt `e^{2U(ζ_n)}`,
//! by self-normalised importance sampling, against the Gaussian values `2 Cov(ζ_i, ζ_n)`.

use anyhow::bail;
use cuefield::cue::VerblunskySampler;
use cuefield::gaussian_field::{cov_kernel, GaussianSampler};
use cuefield::geometry::{hyp_norm, zeta};
use cuefield::stats::WeightedMeans;
use cuefield::DiskPoint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{section, tag, Experiment};
use crate::config::{check_positive, ConfigFile};
use crate::output::Row;
use crate::runner::RunContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Cue,
    Gaussian,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::Cue => "cue",
            Field::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiasedMeanParams {
    pub n: usize,
    /// The ray runs to depth `⌊d(0, 1 - M/N)⌋`.
    pub m_param: f64,
    pub samples: u64,
    pub ess_floor: f64,
    pub fields: Vec<Field>,
    pub chunk: u64,
}

impl Default for BiasedMeanParams {
    fn default() -> Self {
        BiasedMeanParams {
            n: 512,
            m_param: 16.0,
            samples: 200_000,
            ess_floor: 500.0,
            fields: vec![Field::Gaussian, Field::Cue],
            chunk: 10_000,
        }
    }
}

impl BiasedMeanParams {
    pub fn depth(&self) -> usize {
        let r = 1.0 - self.m_param / self.n as f64;
        DiskPoint::real(r).map(|p| hyp_norm(p).floor() as usize).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasedMeanReport {
    pub field: Field,
    pub depth: usize,
    /// `(estimate, standard error, Gaussian value)` for `i = 0..=depth`.
    pub means: Vec<(f64, f64, f64)>,
    pub ess: f64,
    pub samples: u64,
}

pub fn run_biased_mean(p: &BiasedMeanParams, field: Field, ctx: &RunContext) -> anyhow::Result<BiasedMeanReport> {
    check_positive("samples", p.samples)?;
    if p.n < 2 || !(p.m_param > 0.0 && p.m_param < p.n as f64) {
        bail!("need N >= 2 and 0 < M < N");
    }
    let d = p.depth();
    let points: Vec<DiskPoint> = (0..=d).map(|i| zeta(i as f64)).collect();
    let gaussian = GaussianSampler::new(&points)?;
    let n = p.n;
    let parts = ctx.map_chunks(&format!("biased-mean/{}/{n}", field.name()), p.samples, p.chunk, |count, r| {
        let mut acc = WeightedMeans::new(d + 1);
        let mut vals = vec![0.0; d + 1];
        for _ in 0..count {
            match field {
                Field::Cue => {
                    let alpha = VerblunskySampler.coefficients(n, r);
                    for (v, z) in vals.iter_mut().zip(&points) {
                        *v = VerblunskySampler::log_abs_det(&alpha, z.z());
                    }
                }
                Field::Gaussian => gaussian.sample_into(r, &mut vals),
            }
            acc.push(2.0 * vals[d], &vals);
        }
        acc
    });
    let mut acc = WeightedMeans::new(d + 1);
    for part in &parts {
        acc.merge(part);
    }
    let ess = acc.ess();
    if !(ess >= p.ess_floor) {
        bail!("{} effective sample size {ess:.1} is below the floor {}; raise samples or M", field.name(), p.ess_floor);
    }
    let means = (0..=d).map(|i| (acc.mean(i), acc.std_error(i), 2.0 * cov_kernel(points[i], points[d]))).collect();
    Ok(BiasedMeanReport { field, depth: d, means, ess, samples: p.samples })
}

pub struct BiasedMean;

impl Experiment for BiasedMean {
    fn name(&self) -> &'static str {
        "biased-mean"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.biased_mean)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.biased_mean.clone().unwrap_or_default();
        for &field in &p.fields {
            let rep = run_biased_mean(&p, field, ctx)?;
            let base = json!({ "field": field.name(), "n": p.n, "m_param": p.m_param, "depth": rep.depth });
            out.push(Row::exact(self.name(), tag(ctx.seed, &base), "ess", rep.ess, rep.samples));
            for (i, &(m, se, g)) in rep.means.iter().enumerate() {
                let mut params = base.clone();
                params["i"] = json!(i);
                let params = tag(ctx.seed, params);
                out.push(Row::new(self.name(), params.clone(), "tilted_mean", m, se, rep.samples));
                out.push(Row::exact(self.name(), params, "gaussian_mean", g, rep.samples));
            }
        }
        Ok(())
    }
}
