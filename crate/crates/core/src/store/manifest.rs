//! Line-delimited JSON ingestion manifests.
//!
//! ```text
//! {"book_id": "pg-1342", "text_path": "texts/1342.txt", "corpus": "pg19", "genre": "Fiction", "rating": 4.3, "downloads": 51234}
//! ```
//!
//! Relative `text_path`s resolve against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub book_id: String,
    pub text_path: PathBuf,
    pub corpus: String,
    #[serde(default)]
    pub genre: Option<String>,
    #[serde(default)]
    pub rating: Option<f64>,
    #[serde(default)]
    pub downloads: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let invalid = |reason: String| Error::ManifestInvalid { line: line_no, reason };
            let mut entry: ManifestEntry = serde_json::from_str(line).map_err(|e| invalid(e.to_string()))?;
            if entry.book_id.is_empty() {
                return Err(invalid("empty book_id".into()));
            }
            if entry.book_id.contains(['/', '\\']) || entry.book_id == "." || entry.book_id == ".." {
                return Err(invalid(format!("book_id `{}` is not a valid file stem", entry.book_id)));
            }
            if entry.corpus.is_empty() {
                return Err(invalid("empty corpus".into()));
            }
            if entry.rating.is_some_and(|r| !r.is_finite()) {
                return Err(invalid("rating must be finite".into()));
            }
            if !seen.insert(entry.book_id.clone()) {
                return Err(invalid(format!("duplicate book_id `{}`", entry.book_id)));
            }
            if entry.text_path.is_relative() {
                entry.text_path = base_dir.join(&entry.text_path);
            }
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
