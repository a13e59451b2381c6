//! `toeplitz-verify` and `domination`: deterministic identity checks on random instances.

use std::f64::consts::PI;

use cuefield::gaussian_field::{exp_moment_gaussian, BiasSpec};
use cuefield::rng::StreamRng;
use cuefield::toeplitz::{baxter_det, corrected_det, direct_det, exp_moment_cue, RationalSymbol};
use cuefield::{Complex64, DiskPoint};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{section, tag, Experiment};
use crate::config::{check_positive, ConfigFile};
use crate::output::Row;
use crate::runner::RunContext;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToeplitzVerifyParams {
    pub instances: u64,
    pub max_n: usize,
    pub tol: f64,
    pub baxter_tol: f64,
}

impl Default for ToeplitzVerifyParams {
    fn default() -> Self {
        ToeplitzVerifyParams { instances: 200, max_n: 12, tol: 1e-8, baxter_tol: 1e-10 }
    }
}

/// Tally of one family of identity checks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub checks: u64,
    pub failures: u64,
    pub max_rel_error: f64,
}

impl Tally {
    fn record(&mut self, rel: f64, tol: f64) {
        self.checks += 1;
        if !(rel <= tol) {
            self.failures += 1;
        }
        self.max_rel_error = self.max_rel_error.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }

    fn merge(&mut self, o: &Tally) {
        self.checks += o.checks;
        self.failures += o.failures;
        self.max_rel_error = self.max_rel_error.max(o.max_rel_error);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToeplitzReport {
    pub corrected: Tally,
    pub baxter: Tally,
    pub two_point: Tally,
    /// Largest Baxter deviation seen below `max(ℓ, m)`, where the product is not claimed.
    pub baxter_outside: f64,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn random_in_disk(r: &mut StreamRng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * r.random::<f64>().sqrt(), 2.0 * PI * r.random::<f64>())
}

fn verify_instance(p: &ToeplitzVerifyParams, r: &mut StreamRng) -> anyhow::Result<ToeplitzReport> {
    let mut rep = ToeplitzReport::default();
    let sym = RationalSymbol::random(r, 3, 3, 2, 0.9, 0.05);
    for n in sym.a.len().saturating_sub(sym.k).max(1)..=p.max_n {
        if sym.corrected_applies(n) {
            let d = direct_det(&sym, n)?.det;
            rep.corrected.record(rel(corrected_det(&sym, n)?, d), p.tol);
        }
    }

    let cauchy = RationalSymbol::random(r, 3, 3, 0, 0.9, 0.05);
    let cauchy = RationalSymbol::cauchy(cauchy.a, cauchy.b)?;
    let product: Complex64 = cauchy.a.iter().flat_map(|&a| cauchy.b.iter().map(move |&b| ONE / (ONE - a * b))).product();
    for n in 1..=p.max_n {
        let d = direct_det(&cauchy, n)?.det;
        if n >= cauchy.a.len() || n >= cauchy.b.len() {
            rep.baxter.record(rel(baxter_det(&cauchy.a, &cauchy.b, n)?, d), p.baxter_tol);
        } else {
            rep.baxter_outside = rep.baxter_outside.max(rel(product, d));
        }
    }

    let (z1, z2) = (random_in_disk(r, 0.9), random_in_disk(r, 0.9));
    let sym = RationalSymbol::new(vec![z2.conj()], vec![z2], -z1, vec![ONE / z1, z1.conj()], 1)?;
    let den = (1.0 - z1.norm_sqr()) * (1.0 - z2.norm_sqr());
    for n in 1..=p.max_n {
        if sym.corrected_applies(n) {
            let closed = ((ONE - z1.conj() * z2).norm_sqr() - (z1 - z2).norm_sqr() * z1.norm().powi(2 * n as i32)) / den;
            rep.two_point.record(rel(Complex64::new(closed, 0.0), direct_det(&sym, n)?.det), p.tol);
        }
    }
    Ok(rep)
}

pub fn run_toeplitz_verify(p: &ToeplitzVerifyParams, ctx: &RunContext) -> anyhow::Result<ToeplitzReport> {
    check_positive("instances", p.instances)?;
    let parts = ctx.map_streams("toeplitz-verify", p.instances as usize, |_, r| verify_instance(p, r));
    let mut rep = ToeplitzReport::default();
    for part in parts {
        let part = part?;
        rep.corrected.merge(&part.corrected);
        rep.baxter.merge(&part.baxter);
        rep.two_point.merge(&part.two_point);
        rep.baxter_outside = rep.baxter_outside.max(part.baxter_outside);
    }
    Ok(rep)
}

pub struct ToeplitzVerify;

impl Experiment for ToeplitzVerify {
    fn name(&self) -> &'static str {
        "toeplitz-verify"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.toeplitz_verify)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.toeplitz_verify.clone().unwrap_or_default();
        let rep = run_toeplitz_verify(&p, ctx)?;
        let name = self.name();
        for (family, t, tol) in
            [("corrected", rep.corrected, p.tol), ("baxter", rep.baxter, p.baxter_tol), ("two_point", rep.two_point, p.tol)]
        {
            let params = tag(ctx.seed, json!({ "family": family, "instances": p.instances, "max_n": p.max_n, "tol": tol }));
            out.push(Row::exact(name, params.clone(), "checks", t.checks as f64, t.checks));
            out.push(Row::exact(name, params.clone(), "failures", t.failures as f64, t.checks));
            out.push(Row::exact(name, params, "max_rel_error", t.max_rel_error, t.checks));
        }
        let params = tag(ctx.seed, json!({ "family": "baxter_outside", "instances": p.instances, "max_n": p.max_n }));
        out.push(Row::exact(name, params, "max_rel_deviation", rep.baxter_outside, p.instances));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DominationParams {
    pub instances: u64,
    pub max_plus: usize,
    pub radius: f64,
    pub separation: f64,
    pub max_n: usize,
    /// Largest `N` compared against the direct determinant.
    pub direct_max_n: usize,
    pub tol: f64,
}

impl Default for DominationParams {
    fn default() -> Self {
        DominationParams { instances: 100, max_plus: 2, radius: 0.9, separation: 0.05, max_n: 32, direct_max_n: 16, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DominationReport {
    pub det_agreement: Tally,
    pub monotonicity_violations: u64,
    pub domination_violations: u64,
    /// Largest `E e^{B(U)} / E e^{B(G)}` seen; at most 1 under domination.
    pub max_ratio: f64,
    pub comparisons: u64,
}

/// A random bias `2 Σ F(z) - 2 Σ F(y)` with `1..=max_plus` plus points.
pub fn random_bias(r: &mut StreamRng, max_plus: usize, radius: f64, separation: f64) -> BiasSpec {
    loop {
        let k = r.random_range(1..=max_plus);
        let m = r.random_range(0..=k);
        let mut pick = || DiskPoint::from_complex(random_in_disk(r, radius)).expect("inside the disk");
        let plus: Vec<DiskPoint> = (0..k).map(|_| pick()).collect();
        let minus: Vec<DiskPoint> = (0..m).map(|_| pick()).collect();
        if let Ok(b) = BiasSpec::with_floor(plus, minus, separation) {
            return b;
        }
    }
}

fn domination_instance(p: &DominationParams, r: &mut StreamRng) -> anyhow::Result<DominationReport> {
    let mut rep = DominationReport::default();
    let b = random_bias(r, p.max_plus, p.radius, p.separation);
    let g = exp_moment_gaussian(&b)?;
    let sym = RationalSymbol::from_bias(&b)?;
    let mut prev = 0.0;
    for n in 1..=p.max_n {
        let e = exp_moment_cue(&b, n)?;
        if n <= p.direct_max_n {
            let d = direct_det(&sym, n)?.det;
            rep.det_agreement.record(rel(Complex64::new(e, 0.0), d), p.tol);
        }
        rep.comparisons += 1;
        if e < prev * (1.0 - 1e-12) {
            rep.monotonicity_violations += 1;
        }
        if e > g * (1.0 + 1e-12) {
            rep.domination_violations += 1;
        }
        rep.max_ratio = rep.max_ratio.max(e / g);
        prev = e;
    }
    Ok(rep)
}

pub fn run_domination(p: &DominationParams, ctx: &RunContext) -> anyhow::Result<DominationReport> {
    check_positive("instances", p.instances)?;
    let parts = ctx.map_streams("domination", p.instances as usize, |_, r| domination_instance(p, r));
    let mut rep = DominationReport::default();
    for part in parts {
        let part = part?;
        rep.det_agreement.merge(&part.det_agreement);
        rep.monotonicity_violations += part.monotonicity_violations;
        rep.domination_violations += part.domination_violations;
        rep.max_ratio = rep.max_ratio.max(part.max_ratio);
        rep.comparisons += part.comparisons;
    }
    Ok(rep)
}

pub struct Domination;

impl Experiment for Domination {
    fn name(&self) -> &'static str {
        "domination"
    }

    fn params(&self, cfg: &ConfigFile) -> Value {
        section(&cfg.domination)
    }

    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()> {
        let p = cfg.domination.clone().unwrap_or_default();
        let rep = run_domination(&p, ctx)?;
        let params = tag(ctx.seed, &p);
        let name = self.name();
        let t = rep.det_agreement;
        out.push(Row::exact(name, params.clone(), "det_failures", t.failures as f64, t.checks));
        out.push(Row::exact(name, params.clone(), "det_max_rel_error", t.max_rel_error, t.checks));
        out.push(Row::exact(name, params.clone(), "monotonicity_violations", rep.monotonicity_violations as f64, rep.comparisons));
        out.push(Row::exact(name, params.clone(), "domination_violations", rep.domination_violations as f64, rep.comparisons));
        out.push(Row::exact(name, params, "max_cue_to_gaussian_ratio", rep.max_ratio, rep.comparisons));
        Ok(())
    }
}
