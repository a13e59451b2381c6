//! `ballot`: ballot probabilities of the Gaussian walk, the Brownian reflection
//! check, the barrier-shift ratio and the upper-barrier constant.

use cuefield::barrier::{
    ballot_mc, barrier_mc, barrier_shift, bridge_reflection, brownian_mc, ub_barrier_constant, BarrierProblem,
    MCEstimate, ProcessCovariance,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{section, tag, Experiment};
use crate::config::{check_positive, check_sizes, ConfigFile};
use crate::output::Row;
use crate::runner::RunContext;

/// Mean overshoot of the Gaussian walk over a level, `-ζ(1/2)/√(2π)`; the walk
/// with barrier `h` behaves like Brownian motion with barrier `h + OVERSHOOT`.
pub const OVERSHOOT: f64 = 0.582_597_157_939_010_6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BrownianParams {
    pub n: f64,
    pub g: f64,
    pub s: f64,
    pub steps: usize,
    pub samples: u64,
}

impl Default for BrownianParams {
    fn default() -> Self {
        BrownianParams { n: 4.0, g: 1.0, s: -2.0, steps: 1024, samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatioParams {
    pub n: Vec<usize>,
    pub t: f64,
    pub t_prime: f64,
    pub h: f64,
    pub samples: u64,
}

impl Default for RatioParams {
    fn default() -> Self {
        RatioParams { n: vec![256, 1024], t: -10.0, t_prime: -10.1, h: 6.0, samples: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpperBarrierParams {
    pub n: Vec<usize>,
    pub t: f64,
    pub h: f64,
    pub samples: u64,
}

impl Default for UpperBarrierParams {
    fn default() -> Self {
        UpperBarrierParams { n: vec![64, 256, 1024], t: -3.0, h: 0.0, samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallotParams {
    pub n: Vec<usize>,
    pub x: f64,
    pub y: f64,
    pub samples: u64,
    pub chunk: u64,
    pub brownian: Option<BrownianParams>,
    pub ratio: Option<RatioParams>,
    pub upper_barrier: Option<UpperBarrierParams>,
}

impl Default for BallotParams {
    fn default() -> Self {
        BallotParams {
            n: vec![64, 256, 1024],
            x: 3.0,
            y: 3.0,
            samples: 10_000_000,
            chunk: 250_000,
            brownian: Some(BrownianParams::default()),
            ratio: Some(RatioParams::default()),
            upper_barrier: Some(UpperBarrierParams::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallotReport {
    /// `(n, estimate)`.
    pub per_n: Vec<(usize, MCEstimate)>,
    pub x: f64,
    pub y: f64,
}

impl BallotReport {
    /// `p n^{3/2} / (xy)` with its standard error.
    pub fn scaled(&self) -> Vec<(usize, f64, f64)> {
        let k = self.x * self.y;
        self.per_n
            .iter()
            .map(|&(n, e)| {
                let f = (n as f64).powf(1.5) / k;
                (n, e.probability * f, e.std_error * f)
            })
            .collect()
    }

    /// `(max - min) / min` of the scaled values.
    pub fn variation(&self) -> f64 {
        let v: Vec<f64> = self.scaled().iter().map(|s| s.1).collect();
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        (hi - lo) / lo
    }
}

pub fn run_ballot_probabilities(p: &BallotParams, ctx: &RunContext) -> anyhow::Result<BallotReport> {
    check_positive("samples", p.samples)?;
    check_sizes("n", &p.n)?;
    let mut per_n = Vec::new();
    for &n in &p.n {
        let parts = ctx.map_chunks(&format!("ballot/{n}"), p.samples, p.chunk, |count, r| ballot_mc(n, p.x, p.y, count, r));
        per_n.push((n, parts.iter().skip(1).fold(parts[0], |a, b| a.merge(b))));
    }
    Ok(BallotReport { per_n, x: p.x, y: p.y })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCheck {
    pub exact: f64,
    pub monte_carlo: MCEstimate,
}

pub fn run_reflection_check(p: &BrownianParams, ctx: &RunContext) -> anyhow::Result<ReflectionCheck> {
    check_positive("samples", p.samples)?;
    let parts = ctx.map_chunks("ballot/brownian", p.samples, 50_000, |count, r| brownian_mc(p.n, p.g, p.s, p.steps, count, r));
    Ok(ReflectionCheck { exact: bridge_reflection(p.n, p.g, p.s), monte_carlo: MCEstimate::pool(&parts) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub n: usize,
    pub numerator: MCEstimate,
    pub denominator: MCEstimate,
    pub ratio: f64,
    pub std_error: f64,
    /// The same ratio for Brownian motion with barriers raised by [`OVERSHOOT`].
    pub reflection_prediction: f64,
}

pub fn run_ratio(p: &RatioParams, ctx: &RunContext) -> anyhow::Result<Vec<RatioRow>> {
    check_positive("samples", p.samples)?;
    check_sizes("n", &p.n)?;
    let mut rows = Vec::new();
    for &n in &p.n {
        let s = barrier_shift(n);
        let num = BarrierProblem::flat(n, p.h + s, p.t, ProcessCovariance::Walk)?;
        let den = BarrierProblem::flat(n, p.h - s, p.t_prime, ProcessCovariance::Walk)?;
        let est = |prob: &BarrierProblem, label: &str| -> anyhow::Result<MCEstimate> {
            let parts = ctx.map_chunks(&format!("ballot/ratio/{label}/{n}"), p.samples, 50_000, |c, r| barrier_mc(prob, c, r));
            let parts: Vec<MCEstimate> = parts.into_iter().collect::<Result<_, _>>()?;
            Ok(MCEstimate::pool(&parts))
        };
        let (a, b) = (est(&num, "num")?, est(&den, "den")?);
        let ratio = a.probability / b.probability;
        let rel = ((a.std_error / a.probability).powi(2) + (b.std_error / b.probability).powi(2)).sqrt();
        let nf = n as f64;
        let pred = bridge_reflection(nf, p.h + s + OVERSHOOT, p.t) / bridge_reflection(nf, p.h - s + OVERSHOOT, p.t_prime);
        rows.push(RatioRow { n, numerator: a, denominator: b, ratio, std_error: ratio * rel, reflection_prediction: pred });
    }
    Ok(rows)
}

pub fn run_upper_barrier(p: &UpperBarrierParams, ctx: &RunContext) -> anyhow::Result<Vec<(usize, MCEstimate, f64)>> {
    check_positive("samples", p.samples)?;
    check_sizes("n", &p.n)?;
    let mut out = Vec::new();
    for &n in &p.n {
        let prob = BarrierProblem::flat(n, p.h, p.t, ProcessCovariance::Walk)?;
        let parts = ctx.map_chunks(&format!("ballot/upper/{n}"), p.samples, 50_000, |c, r| barrier_mc(&prob, c, r));
        let parts: Vec<MCEstimate> = parts.into_iter().collect::<Result<_, _>>()?;
        let e = MCEstimate::pool(&parts);
        out.push((n, e, ub_barrier_constant(e.probability, n, p.t)));
    }
    Ok(out)
}

pub struct Ballot;

impl Experiment for Ballot {
    fn name(&self) -> &'static str {
        "ballot"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.ballot)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.ballot.clone().unwrap_or_default();
        let name = self.name();
        let seed = ctx.seed;

        let rep = run_ballot_probabilities(&p, ctx)?;
        for ((n, e), (_, sc, sc_se)) in rep.per_n.iter().zip(rep.scaled()) {
            let params = tag(seed, json!({ "n": n, "x": p.x, "y": p.y, "chunk": p.chunk }));
            out.push(Row::new(name, params.clone(), "probability", e.probability, e.std_error, e.samples));
            out.push(Row::new(name, params, "scaled_probability", sc, sc_se, e.samples));
        }
        let params = tag(seed, json!({ "n": p.n, "x": p.x, "y": p.y, "chunk": p.chunk }));
        out.push(Row::exact(name, params, "scaled_variation", rep.variation(), p.samples * p.n.len() as u64));

        if let Some(b) = &p.brownian {
            let c = run_reflection_check(b, ctx)?;
            let params = tag(seed, b);
            out.push(Row::exact(name, params.clone(), "reflection_exact", c.exact, 0));
            out.push(Row::new(name, params, "reflection_brownian_mc", c.monte_carlo.probability, c.monte_carlo.std_error, c.monte_carlo.samples));
        }
        if let Some(rp) = &p.ratio {
            for r in run_ratio(rp, ctx)? {
                let params = tag(seed, json!({ "n": r.n, "t": rp.t, "t_prime": rp.t_prime, "h": rp.h, "shift": barrier_shift(r.n) }));
                out.push(Row::new(name, params.clone(), "ratio", r.ratio, r.std_error, r.numerator.samples));
                out.push(Row::exact(name, params, "ratio_reflection_prediction", r.reflection_prediction, 0));
            }
        }
        if let Some(u) = &p.upper_barrier {
            for (n, e, c) in run_upper_barrier(u, ctx)? {
                let params = tag(seed, json!({ "n": n, "t": u.t, "h": u.h }));
                out.push(Row::new(name, params.clone(), "barrier_probability", e.probability, e.std_error, e.samples));
                let scale = c / e.probability.max(f64::MIN_POSITIVE);
                out.push(Row::new(name, params, "upper_barrier_constant", c, e.std_error * scale, e.samples));
            }
        }
        Ok(())
    }
}
