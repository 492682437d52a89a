use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::clustering::DEFAULT_K;
use crate::descriptors::{CurveThreshold, DescriptorParams, DEFAULT_ALPHABET, DEFAULT_EPSILON, DEFAULT_SEGMENTS};
pub use crate::embedding::ProviderKind;
use crate::embedding::EmbeddingProviderConfig;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;

/// Parameters of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub store: PathBuf,
    pub provider: EmbeddingProviderConfig,
    pub segments: usize,
    pub alphabet: usize,
    pub epsilon: f64,
    pub k: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(store: impl Into<PathBuf>) -> Self {
        Self {
            store: store.into(),
            provider: EmbeddingProviderConfig::default(),
            segments: DEFAULT_SEGMENTS,
            alphabet: DEFAULT_ALPHABET,
            epsilon: DEFAULT_EPSILON,
            k: DEFAULT_K,
            seed: DEFAULT_SEED,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments < 2 {
            return Err(Error::Config(format!("segments must be >= 2, got {}", self.segments)));
        }
        if !(2..=26).contains(&self.alphabet) {
            return Err(Error::Config(format!("alphabet must be in [2, 26], got {}", self.alphabet)));
        }
        CurveThreshold::new(self.epsilon)?;
        if self.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be positive".into()));
        }
        self.provider.validate()
    }

    pub fn descriptor_params(&self) -> Result<DescriptorParams> {
        self.validate()?;
        Ok(DescriptorParams {
            segments: self.segments,
            alphabet: self.alphabet,
            threshold: CurveThreshold::new(self.epsilon)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::new("/tmp/x");
        assert!(cfg.validate().is_ok());
        assert_eq!((cfg.segments, cfg.alphabet, cfg.k, cfg.seed), (16, 5, 8, 42));
        assert_eq!(cfg.epsilon, 0.02);
    }

    #[test]
    fn rejects_bad_values() {
        let base = RunConfig::new("/tmp/x");
        for bad in [
            RunConfig { epsilon: -1.0, ..base.clone() },
            RunConfig { segments: 1, ..base.clone() },
            RunConfig { alphabet: 27, ..base.clone() },
            RunConfig { alphabet: 1, ..base.clone() },
            RunConfig { k: 0, ..base.clone() },
            RunConfig { jobs: 0, ..base.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }
}
