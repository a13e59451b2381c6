//! `max-law` and `gaussian-max`: grid maxima of `U` and of the Gaussian field on
//! the circle of radius `1 - 1/N`.

use cuefield::cue::haar_samplers;
use cuefield::gaussian_field::{CircleSampler, DEFAULT_CIRCLE_TOL};
use cuefield::stats::{wls_slope, Moments};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{section, tag, Experiment};
use crate::config::{check_positive, check_sizes, ConfigFile};
use crate::output::Row;
use crate::runner::RunContext;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxLawParams {
    pub n: Vec<usize>,
    pub samples: u64,
    pub sampler: String,
    /// Grid points per eigenvalue; `⌈log N⌉` when absent. The grid is rounded
    /// up to a power of two.
    pub oversample: Option<usize>,
}

impl Default for MaxLawParams {
    fn default() -> Self {
        MaxLawParams { n: vec![128, 256, 512, 1024, 2048, 4096], samples: 200, sampler: "verblunsky".into(), oversample: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianMaxParams {
    pub n: Vec<usize>,
    pub samples: u64,
    pub oversample: Option<usize>,
    pub tol: f64,
}

impl Default for GaussianMaxParams {
    fn default() -> Self {
        GaussianMaxParams { n: vec![128, 256, 512, 1024, 2048, 4096], samples: 200, oversample: None, tol: DEFAULT_CIRCLE_TOL }
    }
}

/// `(radius, grid size)` used at size `N`.
pub fn grid_for(n: usize, oversample: Option<usize>) -> (f64, usize) {
    let per = oversample.unwrap_or_else(|| (n as f64).ln().ceil() as usize).max(1);
    (1.0 - 1.0 / n as f64, (n * per).next_power_of_two())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxSummary {
    pub n: usize,
    pub grid: usize,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    /// 10%, 50% and 90% sample quantiles.
    pub quantiles: [f64; 3],
}

impl MaxSummary {
    fn from_values(n: usize, grid: usize, mut v: Vec<f64>) -> Self {
        let m: Moments = v.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((p * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
        MaxSummary { n, grid, samples: m.count, mean: m.mean, std_error: m.std_error(), quantiles: [q(0.1), q(0.5), q(0.9)] }
    }

    pub fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// `mean / log N`.
    pub fn normalised(&self) -> f64 {
        self.mean / self.log_n()
    }

    /// `mean - log N`.
    pub fn centred(&self) -> f64 {
        self.mean - self.log_n()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxLawReport {
    pub per_n: Vec<MaxSummary>,
    /// Weighted least-squares slope of `mean(U* - log N)` against `log log N`.
    pub beta: f64,
    pub beta_std_error: f64,
}

fn fit(per_n: Vec<MaxSummary>) -> MaxLawReport {
    let x: Vec<f64> = per_n.iter().map(|s| s.log_n().ln()).collect();
    let y: Vec<f64> = per_n.iter().map(MaxSummary::centred).collect();
    let se: Vec<f64> = per_n.iter().map(|s| s.std_error).collect();
    let (beta, beta_std_error) = if per_n.len() >= 2 { wls_slope(&x, &y, &se) } else { (f64::NAN, f64::NAN) };
    MaxLawReport { per_n, beta, beta_std_error }
}

pub fn run_max_law(p: &MaxLawParams, ctx: &RunContext) -> anyhow::Result<MaxLawReport> {
    check_positive("samples", p.samples)?;
    check_sizes("n", &p.n)?;
    let sampler = haar_samplers().create(&p.sampler)?;
    let mut per_n = Vec::new();
    for &n in &p.n {
        let (radius, m) = grid_for(n, p.oversample);
        let maxima = ctx.map_streams(&format!("max-law/{}/{n}", p.sampler), p.samples as usize, |_, r| {
            let grid = sampler.sample_char_poly(n, r).log_abs_grid(radius, m, 0.0)?;
            Ok::<f64, anyhow::Error>(grid.into_iter().fold(f64::NEG_INFINITY, f64::max))
        });
        per_n.push(MaxSummary::from_values(n, m, maxima.into_iter().collect::<anyhow::Result<_>>()?));
    }
    Ok(fit(per_n))
}

pub fn run_gaussian_max(p: &GaussianMaxParams, ctx: &RunContext) -> anyhow::Result<MaxLawReport> {
    check_positive("samples", p.samples)?;
    check_sizes("n", &p.n)?;
    let mut per_n = Vec::new();
    for &n in &p.n {
        let (radius, m) = grid_for(n, p.oversample);
        let sampler = CircleSampler::with_tolerance(radius, m, p.tol)?;
        let maxima = ctx.map_streams(&format!("gaussian-max/{n}"), p.samples as usize, |_, r| {
            sampler.sample(r).into_iter().fold(f64::NEG_INFINITY, f64::max)
        });
        per_n.push(MaxSummary::from_values(n, m, maxima));
    }
    Ok(fit(per_n))
}

fn push_rows(name: &str, seed: u64, extra: Value, rep: &MaxLawReport, out: &mut Vec<Row>) {
    for s in &rep.per_n {
        let mut params = json!({ "n": s.n, "grid": s.grid, "radius": 1.0 - 1.0 / s.n as f64 });
        if let (Value::Object(a), Value::Object(b)) = (&mut params, &extra) {
            a.extend(b.clone());
        }
        let params = tag(seed, params);
        let l = s.log_n();
        out.push(Row::new(name, params.clone(), "mean_max", s.mean, s.std_error, s.samples));
        out.push(Row::new(name, params.clone(), "mean_max_over_log_n", s.normalised(), s.std_error / l, s.samples));
        out.push(Row::new(name, params.clone(), "mean_max_minus_log_n", s.centred(), s.std_error, s.samples));
        for (q, v) in ["q10", "q50", "q90"].iter().zip(s.quantiles) {
            out.push(Row::exact(name, params.clone(), q, v, s.samples));
        }
    }
    let params = tag(seed, json!({ "n": rep.per_n.iter().map(|s| s.n).collect::<Vec<_>>(), "fit": "wls" }));
    let total = rep.per_n.iter().map(|s| s.samples).sum();
    out.push(Row::new(name, params, "beta_log_log_n", rep.beta, rep.beta_std_error, total));
}

pub struct MaxLaw;

impl Experiment for MaxLaw {
    fn name(&self) -> &'static str {
        "max-law"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.max_law)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.max_law.clone().unwrap_or_default();
        let rep = run_max_law(&p, ctx)?;
        push_rows(self.name(), ctx.seed, json!({ "sampler": p.sampler }), &rep, out);
        Ok(())
    }
}

pub struct GaussianMax;

impl Experiment for GaussianMax {
    fn name(&self) -> &'static str {
        "gaussian-max"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.gaussian_max)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.gaussian_max.clone().unwrap_or_default();
        let rep = run_gaussian_max(&p, ctx)?;
        push_rows(self.name(), ctx.seed, json!({ "tol": p.tol }), &rep, out);
        Ok(())
    }
}
