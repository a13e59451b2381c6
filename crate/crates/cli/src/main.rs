use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use cuefield_cli::experiments::execute;
use cuefield_cli::{experiment_registry, ConfigFile, RunContext};

/// Run one cuefield experiment and write `<experiment>.csv` plus a JSON manifest.
#[derive(Debug, Parser)]
#[command(name = "cuefield", version)]
struct Cli {
    /// toeplitz-verify, moments, domination, max-law, biased-mean, ballot, gaussian-max or relaxation
    experiment: String,
    /// JSON configuration; unknown keys are rejected
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (overrides the config)
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = ConfigFile::load(&cli.config)?;
    let exp = experiment_registry().create(&cli.experiment)?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let workers = cli.workers.or(cfg.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    anyhow::ensure!(workers > 0, "workers must be positive");
    let ctx = RunContext::new(seed, workers)?;
    let res = execute(exp.as_ref(), &cfg, &ctx);
    let (csv, manifest) = res.write(&cli.out).context("writing results")?;
    eprintln!("{} rows -> {}", res.rows.len(), csv.display());
    eprintln!("manifest -> {}", manifest.display());
    if let Some(f) = &res.manifest.failure {
        eprintln!("error: {} failed: {f}", res.manifest.experiment);
        return Ok(false);
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
