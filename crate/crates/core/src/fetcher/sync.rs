use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use chrono::{NaiveDate, Utc};
use log::{debug, info, warn};

use super::{
    parse_index, Cache, CorpusManifest, FetchError, RawResultDocument, ResultReference, Transport,
};

#[derive(Debug, Clone)]
pub struct SyncOptions {
    /// Concurrent download workers.
    pub workers: usize,
    /// Pause after every network request, per worker.
    pub delay: Duration,
    /// Extra attempts after a retryable failure.
    pub retries: u32,
    /// Checksums the synced corpus must reproduce.
    pub pinned: Option<CorpusManifest>,
}

impl Default for SyncOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            delay: Duration::from_millis(500),
            retries: 3,
            pinned: None,
        }
    }
}

pub fn fetch_index(transport: &dyn Transport, index_url: &str) -> Result<Vec<ResultReference>, FetchError> {
    let bytes = transport.get(index_url)?;
    parse_index(&String::from_utf8_lossy(&bytes), index_url)
}

fn get_with_retries(
    transport: &dyn Transport,
    url: &str,
    retries: u32,
    delay: Duration,
) -> Result<Vec<u8>, FetchError> {
    let mut attempt = 0;
    loop {
        match transport.get(url) {
            Err(e) if e.is_retryable() && attempt < retries => {
                attempt += 1;
                let backoff = delay.saturating_mul(1 << attempt.min(6));
                warn!("{e}; retry {attempt}/{retries} in {backoff:?}");
                thread::sleep(backoff);
            }
            other => return other,
        }
    }
}

fn check_pinned(doc: &RawResultDocument, pinned: Option<&str>) -> Result<(), FetchError> {
    match pinned {
        Some(expected) if expected != doc.checksum => Err(FetchError::Integrity {
            result_id: doc.reference.result_id.clone(),
            expected: expected.to_string(),
            actual: doc.checksum.clone(),
        }),
        _ => Ok(()),
    }
}

/// Cached document if present, otherwise downloads and caches it.
///
/// `pinned` is the checksum a manifest expects for this result.
pub fn fetch_result(
    transport: &dyn Transport,
    reference: &ResultReference,
    cache: &Cache,
    pinned: Option<&str>,
) -> Result<RawResultDocument, FetchError> {
    fetch_result_inner(transport, reference, cache, pinned, 0, Duration::ZERO).map(|(doc, _)| doc)
}

/// Returns the document and whether the network was used.
fn fetch_result_inner(
    transport: &dyn Transport,
    reference: &ResultReference,
    cache: &Cache,
    pinned: Option<&str>,
    retries: u32,
    delay: Duration,
) -> Result<(RawResultDocument, bool), FetchError> {
    if let Some(doc) = cache.load(&reference.result_id)? {
        check_pinned(&doc, pinned)?;
        return Ok((doc, false));
    }
    let bytes = get_with_retries(transport, &reference.url, retries, delay)?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(FetchError::EmptyBody {
            url: reference.url.clone(),
        });
    }
    let sum = super::checksum(&bytes);
    if let Some(expected) = pinned.filter(|e| *e != sum) {
        return Err(FetchError::Integrity {
            result_id: reference.result_id.clone(),
            expected: expected.to_string(),
            actual: sum,
        });
    }
    let doc = cache.store(reference, &bytes, Utc::now())?;
    Ok((doc, true))
}

fn load_index(
    transport: &dyn Transport,
    index_url: &str,
    cache: &Cache,
    opts: &SyncOptions,
) -> Result<Vec<ResultReference>, FetchError> {
    match get_with_retries(transport, index_url, opts.retries, opts.delay) {
        Ok(bytes) => {
            let refs = parse_index(&String::from_utf8_lossy(&bytes), index_url)?;
            cache.write_atomic(&cache.index_path(), &bytes)?;
            Ok(refs)
        }
        Err(FetchError::Offline { .. }) if cache.index_path().exists() => {
            let path = cache.index_path();
            let bytes = std::fs::read(&path).map_err(|source| FetchError::Cache { path, source })?;
            parse_index(&String::from_utf8_lossy(&bytes), index_url)
        }
        Err(e) => Err(e),
    }
}

/// Fetches every listed result published on or before `cutoff` and returns
/// the resulting manifest. The manifest is a pure function of the cache
/// contents and the cutoff, so reruns on a warm cache reproduce it exactly.
pub fn sync_corpus(
    transport: &dyn Transport,
    index_url: &str,
    cutoff: NaiveDate,
    cache: &Cache,
    opts: &SyncOptions,
) -> Result<CorpusManifest, FetchError> {
    let refs: Vec<ResultReference> = load_index(transport, index_url, cache, opts)?
        .into_iter()
        .filter(|r| r.published.is_none_or(|p| p <= cutoff))
        .collect();
    info!("{} results on or before {cutoff}", refs.len());

    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(String, String)>> = Mutex::new(Vec::with_capacity(refs.len()));
    let failed: Mutex<Vec<(String, String)>> = Mutex::new(Vec::new());
    let workers = opts.workers.max(1).min(refs.len().max(1));

    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(r) = refs.get(i) else { break };
                let pinned = opts.pinned.as_ref().and_then(|m| m.checksum_of(&r.result_id));
                match fetch_result_inner(transport, r, cache, pinned, opts.retries, opts.delay) {
                    Ok((doc, networked)) => {
                        debug!("{} ({})", r.result_id, if networked { "downloaded" } else { "cached" });
                        done.lock().unwrap().push((doc.reference.result_id, doc.checksum));
                        if networked && !opts.delay.is_zero() {
                            thread::sleep(opts.delay);
                        }
                    }
                    Err(e) => {
                        warn!("{}: {e}", r.result_id);
                        failed.lock().unwrap().push((r.result_id.clone(), e.to_string()));
                    }
                }
            });
        }
    });

    let mut failures = failed.into_inner().unwrap();
    if !failures.is_empty() {
        failures.sort();
        return Err(FetchError::PartialSync {
            attempted: refs.len(),
            failures,
        });
    }
    let snapshot_date = refs.iter().filter_map(|r| r.published).max().unwrap_or(cutoff);
    let manifest = CorpusManifest::new(snapshot_date, cutoff, done.into_inner().unwrap());
    cache.write_atomic(&cache.dir().join("manifest.tsv"), manifest.to_text().as_bytes())?;
    Ok(manifest)
}
