//! Batch harness for the `cuefield` experiments: JSON configuration, seeded
//! parallel execution over independent random streams, CSV and manifest output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
pub mod runner;

pub use config::ConfigFile;
pub use experiments::{experiment_registry, Experiment};
pub use output::{Manifest, Row, RunResult};
pub use runner::RunContext;
