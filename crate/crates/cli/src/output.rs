use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

/// One output line: a statistic for a parameter tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: String,
    /// Parameters sufficient to regenerate the row, including the seed.
    pub params: Value,
    pub statistic: String,
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Row {
    pub fn new(experiment: &str, params: Value, statistic: &str, value: f64, std_error: f64, samples: u64) -> Self {
        Row { experiment: experiment.into(), params, statistic: statistic.into(), value, std_error, samples }
    }

    /// An exact quantity (no sampling error).
    pub fn exact(experiment: &str, params: Value, statistic: &str, value: f64, samples: u64) -> Self {
        Self::new(experiment, params, statistic, value, 0.0, samples)
    }
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    experiment: &'a str,
    param_json: String,
    statistic: &'a str,
    value: String,
    std_error: String,
    samples: u64,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Echo of the run for the sidecar JSON.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub workers: usize,
    pub config: Value,
    pub wall_seconds: f64,
    pub rows: usize,
    /// Set when the experiment stopped early; rows written so far are kept.
    pub failure: Option<String>,
    pub version: &'static str,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<Row>,
    pub manifest: Manifest,
}

impl RunResult {
    /// First row with this statistic whose params contain every key of `filter`.
    pub fn find(&self, statistic: &str, filter: &[(&str, Value)]) -> Option<&Row> {
        find_row(&self.rows, statistic, filter)
    }

    /// Writes `<experiment>.csv` and `<experiment>.manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let csv_path = dir.join(format!("{}.csv", self.manifest.experiment));
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&csv_path)
            .with_context(|| format!("creating {}", csv_path.display()))?;
        for r in &self.rows {
            w.serialize(CsvRecord {
                experiment: &r.experiment,
                param_json: r.params.to_string(),
                statistic: &r.statistic,
                value: float(r.value),
                std_error: float(r.std_error),
                samples: r.samples,
            })?;
        }
        if self.rows.is_empty() {
            w.write_record(["experiment", "param_json", "statistic", "value", "std_error", "samples"])?;
        }
        w.flush()?;
        let man_path = dir.join(format!("{}.manifest.json", self.manifest.experiment));
        let mut f = File::create(&man_path).with_context(|| format!("creating {}", man_path.display()))?;
        serde_json::to_writer_pretty(&mut f, &self.manifest)?;
        f.write_all(b"\n")?;
        Ok((csv_path, man_path))
    }
}

pub fn find_row<'a>(rows: &'a [Row], statistic: &str, filter: &[(&str, Value)]) -> Option<&'a Row> {
    rows.iter().find(|r| r.statistic == statistic && filter.iter().all(|(k, v)| r.params.get(*k) == Some(v)))
}
