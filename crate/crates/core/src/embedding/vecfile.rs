//! Little-endian binary vector files (`<book_id>.nvec`).
//!
//! Layout: magic `NVEC`, `u32` version (1), `u32` dimension, `u64` row count,
//! then `rows * dimension` `f32` values in row-major paragraph order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NVEC";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 20;
pub const EXTENSION: &str = "nvec";

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFile {
    pub dimension: usize,
    pub rows: Vec<Vec<f32>>,
}

pub fn write_vectors<R: AsRef<[f32]>>(path: &Path, dimension: usize, rows: &[R]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(dimension as u32).to_le_bytes())?;
    out.write_all(&(rows.len() as u64).to_le_bytes())?;
    for row in rows {
        let row = row.as_ref();
        if row.len() != dimension {
            return Err(Error::DimensionMismatch { expected: dimension, actual: row.len() });
        }
        for v in row {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_vectors(path: &Path) -> Result<VectorFile> {
    let bad = |reason: String| Error::VectorFormat { path: path.to_owned(), reason };

    let mut reader = BufReader::new(File::open(path)?);
    let mut header = [0u8; HEADER_LEN];
    reader
        .read_exact(&mut header)
        .map_err(|_| bad("truncated header".into()))?;
    if &header[0..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dimension = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let count = u64::from_le_bytes(header[12..20].try_into().unwrap()) as usize;
    if dimension == 0 {
        return Err(bad("zero dimension".into()));
    }

    let mut body = Vec::new();
    reader.read_to_end(&mut body)?;
    let expected = count
        .checked_mul(dimension)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| bad("row count overflow".into()))?;
    if body.len() != expected {
        return Err(bad(format!("expected {expected} data bytes, found {}", body.len())));
    }

    let rows = body
        .chunks_exact(dimension * 4)
        .map(|row| {
            row.chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
                .collect()
        })
        .collect();
    Ok(VectorFile { dimension, rows })
}
