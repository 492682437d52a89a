//! Single-directory record store.
//!
//! Layout of a store directory:
//!
//! * `records.jsonl`: append-only log, one [`BookRecord`] per line. A later
//!   line for the same `book_id` replaces the earlier one.
//! * `index.json`: byte offset of the live line for each book plus the log
//!   length it was built against. It is only a cache; a missing or stale
//!   index is rebuilt from the log.
//! * `LOCK`: held exclusively by the single writer.
//!
//! Readers load a snapshot of the committed lines and never take the lock.

mod export;
mod ingest;
mod log;
mod manifest;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::descriptors::{CurveClass, DescriptorParams, TrajectoryDescriptors};
use crate::error::{Error, Result};

pub use export::{export, export_trajectories, format_float, ExportField, ExportFormat};
pub use ingest::{analyze_text, cluster_store, ClusterRun, IngestFailure, IngestOptions, IngestReport, ingest};
pub use manifest::{Manifest, ManifestEntry};

pub const LOG_FILE: &str = "records.jsonl";
pub const INDEX_FILE: &str = "index.json";
pub const LOCK_FILE: &str = "LOCK";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub model_id: String,
    pub index: usize,
    pub label: String,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookRecord {
    pub book_id: String,
    pub corpus: String,
    pub genre: Option<String>,
    pub rating: Option<f64>,
    pub downloads: Option<u64>,
    pub paragraph_count: usize,
    /// Mean of the full-precision trajectory.
    pub mean_novelty: f64,
    /// Novelty values, held at `f32` precision so the on-disk copy is exact.
    #[serde(with = "f32_values")]
    pub trajectory: Vec<f64>,
    pub descriptors: Option<TrajectoryDescriptors>,
    pub cluster: Option<ClusterAssignment>,
    pub too_short_for_paa: bool,
    /// Descriptor parameters the record was computed with.
    pub params: DescriptorParams,
}

impl BookRecord {
    pub fn curve(&self) -> Option<CurveClass> {
        self.descriptors.as_ref().map(|d| d.curve)
    }

    pub fn paa(&self) -> Option<&[f64]> {
        self.descriptors.as_ref().and_then(|d| d.paa.as_deref())
    }
}

mod f32_values {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        values.iter().map(|&v| v as f32).collect::<Vec<f32>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<f32>::deserialize(d)?.into_iter().map(f64::from).collect())
    }
}

/// Rounds trajectory values to the precision they are stored at.
pub fn storage_precision(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| f64::from(v as f32)).collect()
}

/// Conjunction of optional record predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordFilter {
    pub corpus: Option<String>,
    pub genre: Option<String>,
    pub curve: Option<CurveClass>,
    /// Cluster label.
    pub cluster: Option<String>,
}

impl RecordFilter {
    pub fn corpus(tag: &str) -> Self {
        Self { corpus: Some(tag.to_owned()), ..Self::default() }
    }

    pub fn matches(&self, r: &BookRecord) -> bool {
        self.corpus.as_ref().is_none_or(|c| &r.corpus == c)
            && self.genre.as_ref().is_none_or(|g| r.genre.as_ref() == Some(g))
            && self.curve.is_none_or(|c| r.curve() == Some(c))
            && self.cluster.as_ref().is_none_or(|l| r.cluster.as_ref().is_some_and(|a| &a.label == l))
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(c) = &self.corpus {
            parts.push(format!("corpus={c}"));
        }
        if let Some(g) = &self.genre {
            parts.push(format!("genre={g}"));
        }
        if let Some(c) = self.curve {
            parts.push(format!("curve={c}"));
        }
        if let Some(l) = &self.cluster {
            parts.push(format!("cluster={l}"));
        }
        if parts.is_empty() {
            "all".to_owned()
        } else {
            parts.join(",")
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    log_len: u64,
    offsets: BTreeMap<String, u64>,
}

pub struct Store {
    dir: PathBuf,
    records: BTreeMap<String, BookRecord>,
    offsets: BTreeMap<String, u64>,
    writer: Option<log::LogWriter>,
    _lock: Option<File>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("dir", &self.dir)
            .field("records", &self.records.len())
            .field("writable", &self.writer.is_some())
            .finish()
    }
}

impl Store {
    /// Opens (creating if needed) a store for writing.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_owned();
        std::fs::create_dir_all(&dir)?;
        let lock = File::create(dir.join(LOCK_FILE))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(std::fs::TryLockError::WouldBlock) => return Err(Error::StoreLocked { path: dir }),
            Err(std::fs::TryLockError::Error(e)) => return Err(e.into()),
        }
        let (records, offsets, committed, from_index) = load(&dir)?;
        let writer = log::LogWriter::open(&dir.join(LOG_FILE), committed)?;
        let store = Self { dir, records, offsets, writer: Some(writer), _lock: Some(lock) };
        if !from_index {
            store.write_index()?;
        }
        Ok(store)
    }

    /// Loads a read-only snapshot. A missing directory is an empty store.
    pub fn open_read_only(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_owned();
        let (records, offsets, _, _) = load(&dir)?;
        Ok(Self { dir, records, offsets, writer: None, _lock: None })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, book_id: &str) -> Option<&BookRecord> {
        self.records.get(book_id)
    }

    pub fn contains(&self, book_id: &str) -> bool {
        self.records.contains_key(book_id)
    }

    /// All records ordered by `book_id`.
    pub fn records(&self) -> impl Iterator<Item = &BookRecord> {
        self.records.values()
    }

    /// Records matching every predicate of `filter`, ordered by `book_id`.
    pub fn query(&self, filter: &RecordFilter) -> Vec<&BookRecord> {
        self.records.values().filter(|r| filter.matches(r)).collect()
    }

    /// Appends `record`, replacing any earlier version with the same id.
    pub fn put(&mut self, record: BookRecord) -> Result<()> {
        self.put_all(vec![record])
    }

    /// Appends `records` in order with one sync for the whole batch.
    pub fn put_all(&mut self, records: Vec<BookRecord>) -> Result<()> {
        let writer = self
            .writer
            .as_mut()
            .ok_or_else(|| Error::Config("store opened read-only".into()))?;
        let lines = records.iter().map(serde_json::to_vec).collect::<Result<Vec<_>, _>>()?;
        let offsets = writer.append_all(&lines)?;
        for (record, offset) in records.into_iter().zip(offsets) {
            self.offsets.insert(record.book_id.clone(), offset);
            self.records.insert(record.book_id.clone(), record);
        }
        Ok(())
    }

    /// Persists the offset index. Safe to skip: a stale index is rebuilt.
    pub fn write_index(&self) -> Result<()> {
        let Some(writer) = &self.writer else { return Ok(()) };
        let index = IndexFile { log_len: writer.len(), offsets: self.offsets.clone() };
        let tmp = self.dir.join(format!("{INDEX_FILE}.tmp"));
        let mut f = File::create(&tmp)?;
        f.write_all(&serde_json::to_vec(&index)?)?;
        f.sync_all()?;
        std::fs::rename(&tmp, self.dir.join(INDEX_FILE))?;
        Ok(())
    }

    /// Rewrites the log with only the live version of each record.
    pub fn compact(&mut self) -> Result<()> {
        let log_path = match &self.writer {
            Some(w) => w.path().to_owned(),
            None => return Err(Error::Config("store opened read-only".into())),
        };
        let tmp = self.dir.join(format!("{LOG_FILE}.tmp"));
        let mut offsets = BTreeMap::new();
        {
            let _ = std::fs::remove_file(&tmp);
            let mut w = log::LogWriter::open(&tmp, 0)?;
            let lines = self.records.values().map(serde_json::to_vec).collect::<Result<Vec<_>, _>>()?;
            offsets.extend(self.records.keys().cloned().zip(w.append_all(&lines)?));
        }
        std::fs::rename(&tmp, &log_path)?;
        let len = std::fs::metadata(&log_path)?.len();
        self.writer = Some(log::LogWriter::open(&log_path, len)?);
        self.offsets = offsets;
        self.write_index()
    }
}

impl Drop for Store {
    fn drop(&mut self) {
        let _ = self.write_index();
    }
}

type Loaded = (BTreeMap<String, BookRecord>, BTreeMap<String, u64>, u64, bool);

fn parse_record(offset: u64, line: &[u8]) -> Result<BookRecord> {
    serde_json::from_slice(line).map_err(|e| Error::CorruptRecord { offset, reason: e.to_string() })
}

fn load(dir: &Path) -> Result<Loaded> {
    let log_path = dir.join(LOG_FILE);
    let log_len = match std::fs::metadata(&log_path) {
        Ok(m) => m.len(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
        Err(e) => return Err(e.into()),
    };

    if let Some(index) = std::fs::read(dir.join(INDEX_FILE))
        .ok()
        .and_then(|bytes| serde_json::from_slice::<IndexFile>(&bytes).ok())
        .filter(|idx| idx.log_len == log_len)
    {
        if let Ok(records) = load_indexed(&log_path, &index) {
            return Ok((records, index.offsets, log_len, true));
        }
    }

    let (entries, committed) = log::scan(&log_path)?;
    let mut records = BTreeMap::new();
    let mut offsets = BTreeMap::new();
    for entry in entries {
        let record = parse_record(entry.offset, &entry.line)?;
        offsets.insert(record.book_id.clone(), entry.offset);
        records.insert(record.book_id.clone(), record);
    }
    Ok((records, offsets, committed, false))
}

fn load_indexed(log_path: &Path, index: &IndexFile) -> Result<BTreeMap<String, BookRecord>> {
    let mut file = File::open(log_path)?;
    let mut records = BTreeMap::new();
    for (id, &offset) in &index.offsets {
        let record = parse_record(offset, &log::read_at(&mut file, offset)?)?;
        if &record.book_id != id {
            return Err(Error::CorruptRecord { offset, reason: "index points at another record".into() });
        }
        records.insert(id.clone(), record);
    }
    Ok(records)
}
