//! Line-delimited JSON record files: one self-describing record per line,
//! UTF-8, LF.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {source}")]
    Decode {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

pub fn to_jsonl<'a, S: Serialize + 'a>(items: impl IntoIterator<Item = &'a S>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<'a, W: Write, S: Serialize + 'a>(
    mut w: W,
    items: impl IntoIterator<Item = &'a S>,
) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Blank lines are skipped; line numbers in errors are 1-based.
pub fn read_jsonl<R: BufRead, D: DeserializeOwned>(r: R) -> Result<Vec<D>, RecordError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|source| RecordError::Io {
            path: "<reader>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| RecordError::Decode { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn read_jsonl_file<D: DeserializeOwned>(path: &Path) -> Result<Vec<D>, RecordError> {
    let f = File::open(path).map_err(|source| RecordError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_jsonl(BufReader::new(f))
}
