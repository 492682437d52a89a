//! Manifest ingestion and store-level clustering.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{storage_precision, BookRecord, ClusterAssignment, Manifest, ManifestEntry, RecordFilter, Store};
use crate::clustering::{fit_kmeans, ClusterModel, KMeansOptions};
use crate::descriptors::{describe, DescriptorParams, TrajectoryDescriptors};
use crate::embedding::{embed_batch, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::novelty::novelty_trajectory;
use crate::segmentation::segment_text;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    pub params: DescriptorParams,
    /// Worker threads for segmentation, embedding and descriptors.
    pub jobs: usize,
    /// Leave books already in the store untouched instead of replacing them.
    pub skip_existing: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { params: DescriptorParams::default(), jobs: 1, skip_existing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestFailure {
    pub book_id: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub processed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub failures: Vec<IngestFailure>,
}

/// Trajectory (full precision) and descriptors of one book's text.
pub fn analyze_text(
    book_id: &str,
    text: &str,
    provider: &dyn EmbeddingProvider,
    params: &DescriptorParams,
) -> Result<(Vec<f64>, Option<TrajectoryDescriptors>)> {
    let paragraphs = segment_text(text);
    if paragraphs.is_empty() {
        return Err(Error::EmptyBook);
    }
    let texts: Vec<&str> = paragraphs.iter().map(|p| p.text.as_str()).collect();
    let embeddings = embed_batch(provider, book_id, &texts)?;
    let trajectory = novelty_trajectory(book_id, &embeddings)?;
    let descriptors = if trajectory.len() >= 2 { Some(describe(&trajectory.values, params)?) } else { None };
    Ok((trajectory.values, descriptors))
}

fn analyze_entry(entry: &ManifestEntry, provider: &dyn EmbeddingProvider, params: &DescriptorParams) -> Result<BookRecord> {
    let bytes = std::fs::read(&entry.text_path)?;
    let text = String::from_utf8_lossy(&bytes);
    let (values, descriptors) = analyze_text(&entry.book_id, &text, provider, params)?;
    let mean_novelty = values.iter().sum::<f64>() / values.len() as f64;
    let too_short_for_paa = descriptors.as_ref().is_none_or(|d| d.paa.is_none());
    Ok(BookRecord {
        book_id: entry.book_id.clone(),
        corpus: entry.corpus.clone(),
        genre: entry.genre.clone(),
        rating: entry.rating,
        downloads: entry.downloads,
        paragraph_count: values.len(),
        mean_novelty,
        trajectory: storage_precision(&values),
        descriptors,
        cluster: None,
        too_short_for_paa,
        params: *params,
    })
}

/// Analyzes every manifest entry and persists the results.
///
/// Books are analyzed in parallel and written in manifest order by the
/// calling thread. Per-book failures are reported, not raised.
pub fn ingest(
    store: &mut Store,
    manifest: &Manifest,
    provider: &dyn EmbeddingProvider,
    opts: &IngestOptions,
) -> Result<IngestReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut report = IngestReport::default();

    let pending: Vec<&ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| {
            let skip = opts.skip_existing && store.contains(&e.book_id);
            report.skipped += usize::from(skip);
            !skip
        })
        .collect();

    for chunk in pending.chunks(opts.jobs.max(1) * 8) {
        let results: Vec<Result<BookRecord>> =
            pool.install(|| chunk.par_iter().map(|e| analyze_entry(e, provider, &opts.params)).collect());
        let mut batch = Vec::new();
        for (entry, result) in chunk.iter().zip(results) {
            match result {
                Ok(record) => {
                    batch.push(record);
                    report.processed += 1;
                }
                Err(e) => {
                    report.failed += 1;
                    report.failures.push(IngestFailure { book_id: entry.book_id.clone(), error: e.to_string() });
                }
            }
        }
        store.put_all(batch)?;
    }
    store.write_index()?;
    Ok(report)
}

/// One fitted model and the books it was fitted on.
#[derive(Debug, Clone)]
pub struct ClusterRun {
    pub model_id: String,
    pub model: ClusterModel,
    /// `(book_id, cluster index)` in `book_id` order.
    pub members: Vec<(String, usize)>,
}

impl ClusterRun {
    /// `(label, count, percent)` per cluster, in cluster order.
    pub fn prevalence(&self) -> Vec<(String, usize, f64)> {
        let mut counts = vec![0usize; self.model.k];
        for (_, j) in &self.members {
            counts[*j] += 1;
        }
        let total = self.members.len() as f64;
        counts
            .iter()
            .enumerate()
            .map(|(j, &c)| (self.model.labels[j].clone(), c, 100.0 * c as f64 / total))
            .collect()
    }
}

/// Clusters the PAA vectors of matching records, per corpus or pooled, and
/// stamps each record with its assignment.
///
/// Every group is checked for at least `k` clusterable books before any
/// record is modified.
pub fn cluster_store(
    store: &mut Store,
    filter: &RecordFilter,
    unified: bool,
    opts: &KMeansOptions,
) -> Result<Vec<ClusterRun>> {
    let mut groups: BTreeMap<String, Vec<(String, Vec<f64>)>> = BTreeMap::new();
    for r in store.query(filter) {
        if let Some(paa) = r.paa() {
            let key = if unified { "unified".to_owned() } else { r.corpus.clone() };
            groups.entry(key).or_default().push((r.book_id.clone(), paa.to_vec()));
        }
    }
    if groups.is_empty() {
        return Err(Error::TooFewPoints { k: opts.k, actual: 0 });
    }
    if let Some(small) = groups.values().find(|g| g.len() < opts.k) {
        return Err(Error::TooFewPoints { k: opts.k, actual: small.len() });
    }

    let mut runs = Vec::new();
    for (model_id, members) in groups {
        let vectors: Vec<Vec<f64>> = members.iter().map(|(_, v)| v.clone()).collect();
        let fit = fit_kmeans(&vectors, opts)?;
        let members: Vec<(String, usize)> =
            members.into_iter().map(|(id, _)| id).zip(fit.assignments.iter().copied()).collect();
        runs.push(ClusterRun { model_id, model: fit.model, members });
    }

    let mut updated = Vec::new();
    for run in &runs {
        for (id, j) in &run.members {
            let mut record = store.get(id).expect("member came from the store").clone();
            record.cluster = Some(ClusterAssignment {
                model_id: run.model_id.clone(),
                index: *j,
                label: run.model.labels[*j].clone(),
                k: run.model.k,
                seed: run.model.seed,
            });
            updated.push(record);
        }
    }
    store.put_all(updated)?;
    store.write_index()?;
    Ok(runs)
}
