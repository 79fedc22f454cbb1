//! Corpus acquisition: result index, per-result cache, pinned manifests.

mod cache;
mod index;
mod manifest;
mod sync;
mod transport;

use std::path::PathBuf;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cache::Cache;
pub use index::parse_index;
pub use manifest::CorpusManifest;
pub use sync::{fetch_index, fetch_result, sync_corpus, SyncOptions};
pub use transport::{HttpTransport, OfflineTransport, Transport};

/// One listed result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultReference {
    pub result_id: String,
    pub url: String,
    /// Annotation the listing attached to the entry (`NC`, struck-through, ...).
    pub publication_marker: Option<String>,
    /// Publication date encoded in the result slug, used for cutoffs.
    pub published: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawResultDocument {
    pub reference: ResultReference,
    pub body: String,
    pub fetched_at: DateTime<Utc>,
    pub checksum: String,
}

/// Hex SHA-256 of the raw body bytes.
pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },
    #[error("HTTP {status} fetching {url}")]
    Status { url: String, status: u16 },
    #[error("unrecognized result index construct: {construct}")]
    IndexFormat { construct: String },
    #[error("integrity error for {result_id}: expected checksum {expected}, got {actual}")]
    Integrity {
        result_id: String,
        expected: String,
        actual: String,
    },
    #[error("empty body for {url}")]
    EmptyBody { url: String },
    #[error("offline: {url} is not cached")]
    Offline { url: String },
    #[error("cache I/O error at {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt cache metadata at {path}: {message}")]
    Metadata { path: PathBuf, message: String },
    #[error("malformed manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("partial sync: {} of {attempted} downloads failed", failures.len())]
    PartialSync {
        attempted: usize,
        failures: Vec<(String, String)>,
    },
}

impl FetchError {
    /// Whether another attempt could plausibly succeed.
    pub fn is_retryable(&self) -> bool {
        match self {
            FetchError::Network { .. } => true,
            FetchError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}
