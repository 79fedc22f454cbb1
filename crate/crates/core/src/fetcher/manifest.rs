use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use super::FetchError;

/// Pinned corpus snapshot.
///
/// On disk: two `#` header lines (`snapshot_date`, `cutoff`) followed by one
/// `result_id<TAB>checksum` line per entry, sorted, LF-terminated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub snapshot_date: NaiveDate,
    pub cutoff: NaiveDate,
    entries: Vec<(String, String)>,
}

impl CorpusManifest {
    /// Sorts the entries and drops repeated ids (first one wins).
    pub fn new(snapshot_date: NaiveDate, cutoff: NaiveDate, mut entries: Vec<(String, String)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries.dedup_by(|b, a| a.0 == b.0);
        Self {
            snapshot_date,
            cutoff,
            entries,
        }
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn checksum_of(&self, result_id: &str) -> Option<&str> {
        self.entries
            .binary_search_by(|(id, _)| id.as_str().cmp(result_id))
            .ok()
            .map(|i| self.entries[i].1.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# snapshot_date\t{}", self.snapshot_date).unwrap();
        writeln!(out, "# cutoff\t{}", self.cutoff).unwrap();
        for (id, sum) in &self.entries {
            writeln!(out, "{id}\t{sum}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FetchError> {
        let mut snapshot = None;
        let mut cutoff = None;
        let mut entries = Vec::new();
        let bad = |line: usize, message: String| FetchError::Manifest { line, message };
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let (key, value) = header
                    .trim()
                    .split_once('\t')
                    .ok_or_else(|| bad(n, "header without tab".into()))?;
                let date = NaiveDate::parse_from_str(value.trim(), "%Y-%m-%d")
                    .map_err(|e| bad(n, format!("{key}: {e}")))?;
                match key.trim() {
                    "snapshot_date" => snapshot = Some(date),
                    "cutoff" => cutoff = Some(date),
                    other => return Err(bad(n, format!("unknown header {other:?}"))),
                }
                continue;
            }
            let (id, sum) = line
                .split_once('\t')
                .ok_or_else(|| bad(n, "expected result_id<TAB>checksum".into()))?;
            if id.is_empty() || sum.len() != 64 || !sum.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(bad(n, format!("bad entry {line:?}")));
            }
            entries.push((id.to_string(), sum.to_string()));
        }
        let is_sorted = entries.windows(2).all(|w| w[0].0 < w[1].0);
        if !is_sorted {
            return Err(bad(0, "entries not strictly sorted by result_id".into()));
        }
        Ok(Self {
            snapshot_date: snapshot.ok_or_else(|| bad(0, "missing snapshot_date".into()))?,
            cutoff: cutoff.ok_or_else(|| bad(0, "missing cutoff".into()))?,
            entries,
        })
    }

    pub fn read(path: &Path) -> Result<Self, FetchError> {
        let text = std::fs::read_to_string(path).map_err(|source| FetchError::Cache {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}
