use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::experiments::{
    ballot::BallotParams, biased_mean::BiasedMeanParams, max_law::GaussianMaxParams, max_law::MaxLawParams,
    moments::MomentsParams, relaxation::RelaxationParams, toeplitz::DominationParams, toeplitz::ToeplitzVerifyParams,
};

/// Top-level configuration file. Experiment sections are keyed by experiment
/// name; a missing section means defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    #[serde(rename = "toeplitz-verify")]
    pub toeplitz_verify: Option<ToeplitzVerifyParams>,
    pub moments: Option<MomentsParams>,
    pub domination: Option<DominationParams>,
    #[serde(rename = "max-law")]
    pub max_law: Option<MaxLawParams>,
    #[serde(rename = "biased-mean")]
    pub biased_mean: Option<BiasedMeanParams>,
    pub ballot: Option<BallotParams>,
    #[serde(rename = "gaussian-max")]
    pub gaussian_max: Option<GaussianMaxParams>,
    pub relaxation: Option<RelaxationParams>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: ConfigFile = serde_json::from_str(text).context("invalid config")?;
        if cfg.workers == Some(0) {
            bail!("workers must be positive");
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }
}

pub(crate) fn check_positive(name: &str, v: u64) -> anyhow::Result<()> {
    if v == 0 {
        bail!("{name} must be positive");
    }
    Ok(())
}

pub(crate) fn check_sizes(name: &str, ns: &[usize]) -> anyhow::Result<()> {
    if ns.is_empty() {
        bail!("{name} must not be empty");
    }
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        bail!("{name} entries must be at least 2, got {n}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigFile::from_json(r#"{"seed": 1, "sede": 2}"#).is_err());
        assert!(ConfigFile::from_json(r#"{"ballot": {"n": [64], "xx": 1}}"#).is_err());
        let c = ConfigFile::from_json(r#"{"seed": 3, "ballot": {"n": [64], "samples": 10}}"#).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.ballot.unwrap().n, vec![64]);
        assert!(ConfigFile::from_json(r#"{"workers": 0}"#).is_err());
    }
}
