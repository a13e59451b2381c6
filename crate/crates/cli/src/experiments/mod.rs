//! The experiments, each behind the [`Experiment`] trait and registered by name.

pub mod ballot;
pub mod biased_mean;
pub mod max_law;
pub mod moments;
pub mod relaxation;
pub mod toeplitz;

use std::time::Instant;

use cuefield::registry::Registry;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ConfigFile;
use crate::output::{Manifest, Row, RunResult};
use crate::runner::RunContext;

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    /// The experiment's parameter section, defaults filled in.
    fn params(&self, cfg: &ConfigFile) -> Value;

    /// Pushes rows into `out` as they are produced, so that rows computed
    /// before an error survive it.
    fn run(&self, cfg: &ConfigFile, ctx: &RunContext, out: &mut Vec<Row>) -> anyhow::Result<()>;
}

pub fn experiment_registry() -> Registry<dyn Experiment> {
    Registry::new("experiment")
        .register("toeplitz-verify", || Box::new(toeplitz::ToeplitzVerify) as Box<dyn Experiment>)
        .register("moments", || Box::new(moments::Moments) as Box<dyn Experiment>)
        .register("domination", || Box::new(toeplitz::Domination) as Box<dyn Experiment>)
        .register("max-law", || Box::new(max_law::MaxLaw) as Box<dyn Experiment>)
        .register("biased-mean", || Box::new(biased_mean::BiasedMean) as Box<dyn Experiment>)
        .register("ballot", || Box::new(ballot::Ballot) as Box<dyn Experiment>)
        .register("gaussian-max", || Box::new(max_law::GaussianMax) as Box<dyn Experiment>)
        .register("relaxation", || Box::new(relaxation::Relaxation) as Box<dyn Experiment>)
}

/// Runs one experiment and assembles rows and manifest. An error inside the
/// experiment is recorded in the manifest rather than returned.
pub fn execute(exp: &dyn Experiment, cfg: &ConfigFile, ctx: &RunContext) -> RunResult {
    let start = Instant::now();
    let mut rows = Vec::new();
    let failure = exp.run(cfg, ctx, &mut rows).err().map(|e| format!("{e:#}"));
    let manifest = Manifest {
        experiment: exp.name().into(),
        seed: ctx.seed,
        workers: ctx.workers,
        config: json!({ "seed": ctx.seed, "workers": ctx.workers, exp.name(): exp.params(cfg) }),
        wall_seconds: start.elapsed().as_secs_f64(),
        rows: rows.len(),
        failure,
        version: env!("CARGO_PKG_VERSION"),
    };
    RunResult { rows, manifest }
}

/// Parameter object for a row: the given fields plus the seed.
pub(crate) fn tag(seed: u64, fields: impl Serialize) -> Value {
    let mut v = serde_json::to_value(fields).expect("row parameters serialise");
    if let Value::Object(m) = &mut v {
        m.insert("seed".into(), json!(seed));
    }
    v
}

pub(crate) fn section<T: Serialize + Default + Clone>(s: &Option<T>) -> Value {
    serde_json::to_value(s.clone().unwrap_or_default()).expect("parameters serialise")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_experiment_is_registered_under_its_name() {
        let reg = experiment_registry();
        assert_eq!(reg.names().len(), 8);
        for name in reg.names() {
            assert_eq!(reg.create(name).unwrap().name(), name);
        }
        assert!(reg.create("nope").is_err());
    }
}
