use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use super::{checksum, FetchError, RawResultDocument, ResultReference};
use crate::parser::decode_report;

/// Sidecar stored next to each cached body.
#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    reference: ResultReference,
    fetched_at: DateTime<Utc>,
    checksum: String,
}

/// On-disk result cache: `<id>.txt` holds the body exactly as served,
/// `<id>.meta.json` the reference, fetch time and checksum.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FetchError + '_ {
    move |source| FetchError::Cache {
        path: path.to_path_buf(),
        source,
    }
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, FetchError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn body_path(&self, result_id: &str) -> PathBuf {
        self.dir.join(format!("{result_id}.txt"))
    }

    pub fn meta_path(&self, result_id: &str) -> PathBuf {
        self.dir.join(format!("{result_id}.meta.json"))
    }

    pub fn index_path(&self) -> PathBuf {
        self.dir.join("index.html")
    }

    /// Writes `bytes` to `path` through a temp file in the same directory.
    pub(crate) fn write_atomic(&self, path: &Path, bytes: &[u8]) -> Result<(), FetchError> {
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(io_err(&self.dir))?;
        tmp.write_all(bytes).map_err(io_err(path))?;
        tmp.as_file().sync_all().map_err(io_err(path))?;
        tmp.persist(path).map_err(|e| FetchError::Cache {
            path: path.to_path_buf(),
            source: e.error,
        })?;
        Ok(())
    }

    /// Cached document for `result_id`, if its sidecar exists. The body is
    /// re-hashed and must match the recorded checksum.
    pub fn load(&self, result_id: &str) -> Result<Option<RawResultDocument>, FetchError> {
        let meta_path = self.meta_path(result_id);
        if !meta_path.exists() {
            return Ok(None);
        }
        let meta_raw = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        let meta: Sidecar = serde_json::from_str(&meta_raw).map_err(|e| FetchError::Metadata {
            path: meta_path.clone(),
            message: e.to_string(),
        })?;
        let body_path = self.body_path(result_id);
        let bytes = fs::read(&body_path).map_err(io_err(&body_path))?;
        let actual = checksum(&bytes);
        if actual != meta.checksum {
            return Err(FetchError::Integrity {
                result_id: result_id.to_string(),
                expected: meta.checksum,
                actual,
            });
        }
        Ok(Some(RawResultDocument {
            reference: meta.reference,
            body: decode_report(&bytes),
            fetched_at: meta.fetched_at,
            checksum: actual,
        }))
    }

    /// Stores a freshly downloaded body. An existing body is never rewritten;
    /// if one is present it must hash identically.
    pub fn store(
        &self,
        reference: &ResultReference,
        bytes: &[u8],
        fetched_at: DateTime<Utc>,
    ) -> Result<RawResultDocument, FetchError> {
        let sum = checksum(bytes);
        let body_path = self.body_path(&reference.result_id);
        if body_path.exists() {
            let existing = fs::read(&body_path).map_err(io_err(&body_path))?;
            let existing_sum = checksum(&existing);
            if existing_sum != sum {
                return Err(FetchError::Integrity {
                    result_id: reference.result_id.clone(),
                    expected: existing_sum,
                    actual: sum,
                });
            }
        } else {
            self.write_atomic(&body_path, bytes)?;
        }
        let meta = Sidecar {
            reference: reference.clone(),
            fetched_at,
            checksum: sum.clone(),
        };
        let meta_json = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
        self.write_atomic(&self.meta_path(&reference.result_id), meta_json.as_bytes())?;
        Ok(RawResultDocument {
            reference: reference.clone(),
            body: decode_report(bytes),
            fetched_at,
            checksum: sum,
        })
    }

    /// Every `.txt` report in the directory, sorted by result id. Works on a
    /// bare directory of reports too: without a sidecar the reference is
    /// synthesized from the file name and the file's mtime stands in for the
    /// fetch time.
    pub fn documents(&self) -> Result<Vec<RawResultDocument>, FetchError> {
        let mut ids: Vec<String> = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(io_err(&self.dir))? {
            let entry = entry.map_err(io_err(&self.dir))?;
            let name = entry.file_name();
            let Some(name) = name.to_str() else { continue };
            if let Some(id) = name.strip_suffix(".txt") {
                ids.push(id.to_string());
            }
        }
        ids.sort();
        ids.into_iter()
            .map(|id| match self.load(&id)? {
                Some(doc) => Ok(doc),
                None => self.load_bare(&id),
            })
            .collect()
    }

    fn load_bare(&self, result_id: &str) -> Result<RawResultDocument, FetchError> {
        let path = self.body_path(result_id);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        let fetched_at = fs::metadata(&path)
            .and_then(|m| m.modified())
            .map(DateTime::<Utc>::from)
            .unwrap_or_default();
        Ok(RawResultDocument {
            reference: ResultReference {
                result_id: result_id.to_string(),
                url: format!("file://{}", path.display()),
                publication_marker: None,
                published: None,
            },
            body: decode_report(&bytes),
            fetched_at,
            checksum: checksum(&bytes),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(id: &str) -> ResultReference {
        ResultReference {
            result_id: id.into(),
            url: format!("https://example.org/{id}.txt"),
            publication_marker: None,
            published: None,
        }
    }

    #[test]
    fn store_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let at = DateTime::from_timestamp(1_700_000_000, 0).unwrap();
        let stored = cache.store(&reference("r1"), b"hello", at).unwrap();
        let loaded = cache.load("r1").unwrap().unwrap();
        assert_eq!(stored, loaded);
        assert_eq!(loaded.checksum, checksum(b"hello"));
    }

    #[test]
    fn tampered_body_is_an_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        cache.store(&reference("r1"), b"hello", Utc::now()).unwrap();
        fs::write(cache.body_path("r1"), b"HELLO").unwrap();
        assert!(matches!(cache.load("r1"), Err(FetchError::Integrity { .. })));
    }

    #[test]
    fn existing_body_is_not_rewritten() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        fs::write(cache.body_path("r1"), b"original").unwrap();
        let err = cache.store(&reference("r1"), b"different", Utc::now()).unwrap_err();
        assert!(matches!(err, FetchError::Integrity { .. }));
        assert_eq!(fs::read(cache.body_path("r1")).unwrap(), b"original");
    }

    #[test]
    fn bare_directory_listing() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.txt"), b"two").unwrap();
        fs::write(dir.path().join("a.txt"), b"one").unwrap();
        fs::write(dir.path().join("notes.md"), b"skip").unwrap();
        let docs = Cache::open(dir.path()).unwrap().documents().unwrap();
        let ids: Vec<_> = docs.iter().map(|d| d.reference.result_id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
    }
}
