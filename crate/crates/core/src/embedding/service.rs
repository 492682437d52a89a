//! HTTP embedding service client.
//!
//! `POST <base>/embed` with `{"texts": [...]}`; a 200 response carries
//! `{"vectors": [[...], ...]}`. Anything else is `ProviderUnavailable`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::EmbeddingProvider;
use crate::error::{Error, Result};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

pub struct ServiceProvider {
    endpoint: String,
    dimension: usize,
    batch_size: usize,
    agent: ureq::Agent,
}

impl std::fmt::Debug for ServiceProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ServiceProvider")
            .field("endpoint", &self.endpoint)
            .field("dimension", &self.dimension)
            .field("batch_size", &self.batch_size)
            .finish()
    }
}

impl ServiceProvider {
    pub fn new(base_url: &str, dimension: usize, batch_size: usize) -> Self {
        let base = base_url.trim_end_matches('/');
        let endpoint = if base.ends_with("/embed") { base.to_owned() } else { format!("{base}/embed") };
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(10))
            .timeout(Duration::from_secs(300))
            .build();
        Self { endpoint, dimension, batch_size: batch_size.max(1), agent }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn request(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let unavailable = |msg: String| Error::ProviderUnavailable(format!("{}: {msg}", self.endpoint));
        let response = self
            .agent
            .post(&self.endpoint)
            .send_json(EmbedRequest { texts })
            .map_err(|e| match e {
                ureq::Error::Status(code, _) => unavailable(format!("HTTP {code}")),
                ureq::Error::Transport(t) => unavailable(t.to_string()),
            })?;
        if response.status() != 200 {
            return Err(unavailable(format!("HTTP {}", response.status())));
        }
        let body: EmbedResponse = response
            .into_json()
            .map_err(|e| unavailable(format!("malformed response: {e}")))?;
        Ok(body.vectors)
    }
}

impl EmbeddingProvider for ServiceProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_raw(&self, _book_id: &str, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.batch_size) {
            let vectors = self.request(chunk)?;
            if vectors.len() != chunk.len() {
                return Err(Error::CountMismatch { expected: chunk.len(), actual: vectors.len() });
            }
            out.extend(vectors);
        }
        Ok(out)
    }
}
