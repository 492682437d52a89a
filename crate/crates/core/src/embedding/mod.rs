//! Paragraph embeddings.
//!
//! The engine never runs an encoder in-process. Vectors come from one of
//! three providers: a deterministic mock, precomputed `.nvec` files, or an
//! HTTP embedding service. Every vector leaving this module is unit-norm,
//! finite and of the run-level dimension.

mod service;
pub mod vecfile;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use service::ServiceProvider;

pub const DEFAULT_DIMENSION: usize = 768;
pub const DEFAULT_BATCH_SIZE: usize = 64;

/// Norms below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// A finite, unit-norm embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for EmbeddingVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Scales `raw` to unit Euclidean length.
pub fn normalize(raw: &[f64]) -> Result<EmbeddingVector> {
    if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    Ok(EmbeddingVector(raw.iter().map(|v| v / norm).collect()))
}

/// A source of raw paragraph vectors.
///
/// Implementations must return one vector per text, in input order. The
/// `book_id` lets file-backed providers locate per-book storage.
pub trait EmbeddingProvider: Send + Sync {
    fn dimension(&self) -> usize;

    fn embed_raw(&self, book_id: &str, texts: &[&str]) -> Result<Vec<Vec<f64>>>;
}

/// Embeds `texts` and validates the result at the provider boundary.
pub fn embed_batch(
    provider: &dyn EmbeddingProvider,
    book_id: &str,
    texts: &[&str],
) -> Result<Vec<EmbeddingVector>> {
    if texts.is_empty() {
        return Err(Error::EmptyBook);
    }
    let raw = provider.embed_raw(book_id, texts)?;
    if raw.len() != texts.len() {
        return Err(Error::CountMismatch { expected: texts.len(), actual: raw.len() });
    }
    let dimension = provider.dimension();
    raw.iter()
        .map(|v| {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, actual: v.len() });
            }
            normalize(v)
        })
        .collect()
}

/// Deterministic Gaussian embedding of `text`.
///
/// A ChaCha stream keyed by `sha256(seed || text)` yields `dimension`
/// standard normals, which are then normalized.
pub fn mock_embed(text: &str, dimension: usize, seed: u64) -> EmbeddingVector {
    assert!(dimension >= 2, "mock embedding dimension must be at least 2");
    normalize(&mock_raw(text, dimension, seed)).expect("gaussian sample has nonzero norm")
}

fn mock_raw(text: &str, dimension: usize, seed: u64) -> Vec<f64> {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(text.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    let mut rng = ChaCha20Rng::from_seed(key);
    (0..dimension).map(|_| StandardNormal.sample(&mut rng)).collect()
}

#[derive(Debug, Clone)]
pub struct MockProvider {
    pub dimension: usize,
    pub seed: u64,
}

impl EmbeddingProvider for MockProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_raw(&self, _book_id: &str, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        Ok(texts.iter().map(|t| mock_raw(t, self.dimension, self.seed)).collect())
    }
}

/// Reads precomputed vectors from `<dir>/<book_id>.nvec`.
#[derive(Debug, Clone)]
pub struct FileProvider {
    pub dir: PathBuf,
    pub dimension: usize,
}

impl FileProvider {
    pub fn path_for(&self, book_id: &str) -> PathBuf {
        self.dir.join(format!("{book_id}.{}", vecfile::EXTENSION))
    }
}

impl EmbeddingProvider for FileProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_raw(&self, book_id: &str, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let path = self.path_for(book_id);
        let file = vecfile::read_vectors(&path).map_err(|e| match e {
            Error::Io(io) => Error::ProviderUnavailable(format!("{}: {io}", path.display())),
            other => other,
        })?;
        if file.dimension != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, actual: file.dimension });
        }
        if file.rows.len() != texts.len() {
            return Err(Error::CountMismatch { expected: texts.len(), actual: file.rows.len() });
        }
        Ok(file
            .rows
            .into_iter()
            .map(|row| row.into_iter().map(f64::from).collect())
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Mock,
    File,
    Service,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingProviderConfig {
    pub kind: ProviderKind,
    pub dimension: usize,
    pub service_url: Option<String>,
    /// Directory holding `<book_id>.nvec` files (file provider).
    pub vector_dir: Option<PathBuf>,
    pub batch_size: usize,
    pub seed: Option<u64>,
}

impl Default for EmbeddingProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Mock,
            dimension: DEFAULT_DIMENSION,
            service_url: None,
            vector_dir: None,
            batch_size: DEFAULT_BATCH_SIZE,
            seed: None,
        }
    }
}

impl EmbeddingProviderConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_owned()));
        if self.dimension == 0 {
            return fail("embedding dimension must be positive");
        }
        if self.batch_size == 0 {
            return fail("batch size must be positive");
        }
        match (self.kind, &self.service_url) {
            (ProviderKind::Service, None) => return fail("service provider requires a service URL"),
            (ProviderKind::Mock | ProviderKind::File, Some(_)) => {
                return fail("a service URL is only valid with the service provider")
            }
            _ => {}
        }
        if self.kind == ProviderKind::Mock && self.dimension < 2 {
            return fail("mock provider requires dimension >= 2");
        }
        if self.kind == ProviderKind::File && self.vector_dir.is_none() {
            return fail("file provider requires a vector directory");
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Box<dyn EmbeddingProvider>> {
        self.validate()?;
        Ok(match self.kind {
            ProviderKind::Mock => Box::new(MockProvider {
                dimension: self.dimension,
                seed: self.seed.unwrap_or(0),
            }),
            ProviderKind::File => Box::new(FileProvider {
                dir: self.vector_dir.clone().expect("validated"),
                dimension: self.dimension,
            }),
            ProviderKind::Service => Box::new(ServiceProvider::new(
                self.service_url.as_deref().expect("validated"),
                self.dimension,
                self.batch_size,
            )),
        })
    }
}
