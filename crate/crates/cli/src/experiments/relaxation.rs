//! `relaxation`: the deterministic radial inequalities on sampled spectra.

use cuefield::cue::{haar_samplers, relaxation_check_poly, stated_form_threshold};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{section, tag, Experiment};
use crate::config::{check_positive, check_sizes, ConfigFile};
use crate::output::Row;
use crate::runner::RunContext;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxationParams {
    pub n: Vec<usize>,
    pub configs: u64,
    pub m_param: f64,
    /// Grid points per eigenvalue, rounded up to a power of two overall.
    pub oversample: usize,
    pub sampler: String,
    pub tol: f64,
}

impl Default for RelaxationParams {
    fn default() -> Self {
        RelaxationParams { n: vec![64, 256], configs: 100, m_param: 4.0, oversample: 4, sampler: "verblunsky".into(), tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSummary {
    pub n: usize,
    pub configs: u64,
    pub checks: u64,
    pub violations: u64,
    pub min_radial_slack: f64,
    pub min_matched_slack: f64,
    pub min_stated_slack: f64,
    pub stated_form_guaranteed: bool,
}

pub fn run_relaxation(p: &RelaxationParams, ctx: &RunContext) -> anyhow::Result<Vec<RelaxationSummary>> {
    check_positive("configs", p.configs)?;
    check_sizes("n", &p.n)?;
    let sampler = haar_samplers().create(&p.sampler)?;
    let mut out = Vec::new();
    for &n in &p.n {
        let fine = (p.oversample.max(1) * n).next_power_of_two();
        let tol = p.tol * n as f64;
        let reports = ctx.map_streams(&format!("relaxation/{n}"), p.configs as usize, |_, r| {
            relaxation_check_poly(&sampler.sample_char_poly(n, r), p.m_param, fine, 0.0)
        });
        let mut s = RelaxationSummary {
            n,
            configs: p.configs,
            checks: 0,
            violations: 0,
            min_radial_slack: f64::INFINITY,
            min_matched_slack: f64::INFINITY,
            min_stated_slack: f64::INFINITY,
            stated_form_guaranteed: n as f64 >= stated_form_threshold(p.m_param),
        };
        for rep in reports {
            let rep = rep?;
            s.checks += rep.radial_checks as u64 + 1;
            s.violations += rep.violations(tol) as u64;
            s.min_radial_slack = s.min_radial_slack.min(rep.radial_slack);
            s.min_matched_slack = s.min_matched_slack.min(rep.matched_slack);
            s.min_stated_slack = s.min_stated_slack.min(rep.stated_slack);
        }
        out.push(s);
    }
    Ok(out)
}

pub struct Relaxation;

impl Experiment for Relaxation {
    fn name(&self) -> &'static str {
        "relaxation"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.relaxation)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.relaxation.clone().unwrap_or_default();
        for s in run_relaxation(&p, ctx)? {
            let params = tag(
                ctx.seed,
                json!({ "n": s.n, "m_param": p.m_param, "configs": p.configs, "sampler": p.sampler, "oversample": p.oversample }),
            );
            let name = self.name();
            out.push(Row::exact(name, params.clone(), "violations", s.violations as f64, s.checks));
            out.push(Row::exact(name, params.clone(), "min_radial_slack", s.min_radial_slack, s.configs));
            out.push(Row::exact(name, params.clone(), "min_matched_slack", s.min_matched_slack, s.configs));
            out.push(Row::exact(name, params.clone(), "min_stated_slack", s.min_stated_slack, s.configs));
            out.push(Row::exact(name, params, "stated_form_guaranteed", f64::from(u8::from(s.stated_form_guaranteed)), s.configs));
        }
        Ok(())
    }
}
