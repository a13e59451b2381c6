//! `moments`: `E|Tr U^k|^2` against `min(k, N)` for each Haar sampler.

use cuefield::cue::haar_samplers;
use cuefield::stats::Moments as Acc;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{section, tag, Experiment};
use crate::config::{check_positive, check_sizes, ConfigFile};
use crate::output::Row;
use crate::runner::RunContext;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsParams {
    pub n: Vec<usize>,
    pub samples: u64,
    pub samplers: Vec<String>,
    /// Largest `k` as a multiple of `N`.
    pub k_factor: usize,
    pub chunk: u64,
}

impl Default for MomentsParams {
    fn default() -> Self {
        MomentsParams {
            n: vec![2, 4, 8],
            samples: 200_000,
            samplers: vec!["qr".into(), "verblunsky".into()],
            k_factor: 2,
            chunk: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCell {
    pub sampler: String,
    pub n: usize,
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MomentCell {
    pub fn theory(&self) -> f64 {
        self.k.min(self.n) as f64
    }
}

pub fn run_moments(p: &MomentsParams, ctx: &RunContext) -> anyhow::Result<Vec<MomentCell>> {
    check_positive("samples", p.samples)?;
    check_sizes("n", &p.n)?;
    let reg = haar_samplers();
    let mut cells = Vec::new();
    for name in &p.samplers {
        let sampler = reg.create(name)?;
        for &n in &p.n {
            let kmax = p.k_factor.max(1) * n;
            let parts = ctx.map_chunks(&format!("moments/{name}/{n}"), p.samples, p.chunk, |count, r| {
                let mut acc = vec![Acc::default(); kmax];
                for _ in 0..count {
                    let poly = sampler.sample_char_poly(n, r);
                    for (a, s) in acc.iter_mut().zip(poly.power_sums(kmax)) {
                        a.push(s.norm_sqr());
                    }
                }
                acc
            });
            let mut acc = vec![Acc::default(); kmax];
            for part in &parts {
                for (a, b) in acc.iter_mut().zip(part) {
                    a.merge(b);
                }
            }
            for (i, a) in acc.iter().enumerate() {
                cells.push(MomentCell {
                    sampler: name.clone(),
                    n,
                    k: i + 1,
                    mean: a.mean,
                    std_error: a.std_error(),
                    samples: a.count,
                });
            }
        }
    }
    Ok(cells)
}

pub struct Moments;

impl Experiment for Moments {
    fn name(&self) -> &'static str {
        "moments"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.moments)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.moments.clone().unwrap_or_default();
        for c in run_moments(&p, ctx)? {
            let params = tag(ctx.seed, json!({ "sampler": c.sampler, "n": c.n, "k": c.k, "samples": p.samples }));
            out.push(Row::new(self.name(), params.clone(), "mean_abs_trace_sq", c.mean, c.std_error, c.samples));
            out.push(Row::exact(self.name(), params, "theory", c.theory(), c.samples));
        }
        Ok(())
    }
}
