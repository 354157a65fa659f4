//! JSON-lines caches for mined histories and releases.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ChangeRecord, Release};
use crate::error::{Error, Result};

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item).expect("cache types always serialize");
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut items = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| Error::CorruptCache {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_history(path: &Path, records: &[ChangeRecord]) -> Result<()> {
    write_jsonl(path, records)
}

pub fn write_releases(path: &Path, releases: &[Release]) -> Result<()> {
    write_jsonl(path, releases)
}

/// Reads a history cache and checks the record invariants.
pub fn read_history(path: &Path) -> Result<Vec<ChangeRecord>> {
    let records: Vec<ChangeRecord> = read_jsonl(path)?;
    let mut seen = std::collections::HashSet::new();
    for (idx, r) in records.iter().enumerate() {
        let bad = |message: String| Error::CorruptCache {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        if r.commit_time <= 0 {
            return Err(bad(format!("commit_time {} is not positive", r.commit_time)));
        }
        if !seen.insert((r.commit_id.as_str(), r.file_path.as_str())) {
            return Err(bad(format!(
                "duplicate record for commit {} file {}",
                r.commit_id, r.file_path
            )));
        }
    }
    Ok(records)
}

pub fn read_releases(path: &Path) -> Result<Vec<Release>> {
    let releases: Vec<Release> = read_jsonl(path)?;
    for (idx, r) in releases.iter().enumerate() {
        let ordinal_ok = r.ordinal == idx + 1;
        let time_ok = idx == 0 || releases[idx - 1].release_time <= r.release_time;
        if !ordinal_ok || !time_ok {
            return Err(Error::CorruptCache {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("release {} out of order", r.tag_name),
            });
        }
    }
    Ok(releases)
}
