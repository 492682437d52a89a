//! Append-only record log.
//!
//! One JSON document per line. A line counts only once its terminating
//! newline is on disk, so an interrupted append leaves at most a torn tail
//! that readers ignore and the next writer truncates.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// A committed line and its byte offset in the log.
pub(crate) struct LogEntry {
    pub offset: u64,
    pub line: Vec<u8>,
}

/// Reads every committed line. Returns the entries and the committed length.
pub(crate) fn scan(path: &Path) -> Result<(Vec<LogEntry>, u64)> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((Vec::new(), 0)),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut entries = Vec::new();
    let mut offset = 0u64;
    loop {
        let mut line = Vec::new();
        let read = reader.read_until(b'\n', &mut line)?;
        if read == 0 || line.last() != Some(&b'\n') {
            break;
        }
        line.pop();
        entries.push(LogEntry { offset, line });
        offset += read as u64;
    }
    Ok((entries, offset))
}

/// Reads the committed line starting at `offset`.
pub(crate) fn read_at(file: &mut File, offset: u64) -> Result<Vec<u8>> {
    file.seek(SeekFrom::Start(offset))?;
    let mut reader = BufReader::new(&mut *file);
    let mut line = Vec::new();
    reader.read_until(b'\n', &mut line)?;
    if line.pop() != Some(b'\n') {
        return Err(Error::CorruptRecord { offset, reason: "unterminated record".into() });
    }
    Ok(line)
}

pub(crate) struct LogWriter {
    path: PathBuf,
    file: File,
    len: u64,
}

impl LogWriter {
    /// Opens the log for appending, dropping any torn tail past `committed`.
    pub fn open(path: &Path, committed: u64) -> Result<Self> {
        let file = OpenOptions::new().create(true).read(true).write(true).truncate(false).open(path)?;
        if file.metadata()?.len() != committed {
            file.set_len(committed)?;
            file.sync_all()?;
        }
        Ok(Self { path: path.to_owned(), file, len: committed })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends `line` plus newline and syncs. Returns the line's offset.
    #[cfg(test)]
    pub fn append(&mut self, line: &[u8]) -> Result<u64> {
        Ok(self.append_all(&[line])?[0])
    }

    /// Appends each line plus newline with a single sync at the end.
    /// Returns the offset of every line.
    pub fn append_all<L: AsRef<[u8]>>(&mut self, lines: &[L]) -> Result<Vec<u64>> {
        let mut offsets = Vec::with_capacity(lines.len());
        let mut buf = Vec::new();
        for line in lines {
            let line = line.as_ref();
            debug_assert!(!line.contains(&b'\n'));
            offsets.push(self.len + buf.len() as u64);
            buf.extend_from_slice(line);
            buf.push(b'\n');
        }
        self.file.seek(SeekFrom::Start(self.len))?;
        self.file.write_all(&buf)?;
        self.file.sync_data()?;
        self.len += buf.len() as u64;
        Ok(offsets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torn_tail_is_ignored_then_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log");
        let mut w = LogWriter::open(&path, 0).unwrap();
        assert_eq!(w.append(b"{\"a\":1}").unwrap(), 0);
        assert_eq!(w.append(b"{\"b\":2}").unwrap(), 8);
        drop(w);

        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"c\":").unwrap();
        drop(f);

        let (entries, committed) = scan(&path).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(committed, 16);
        assert_eq!(entries[1].line, b"{\"b\":2}");

        let mut w = LogWriter::open(&path, committed).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 16);
        w.append(b"{\"c\":3}").unwrap();
        let (entries, _) = scan(&path).unwrap();
        assert_eq!(entries.len(), 3);

        let mut f = File::open(&path).unwrap();
        assert_eq!(read_at(&mut f, 8).unwrap(), b"{\"b\":2}");
    }

    #[test]
    fn missing_log_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let (entries, len) = scan(&dir.path().join("nope")).unwrap();
        assert!(entries.is_empty());
        assert_eq!(len, 0);
    }
}
