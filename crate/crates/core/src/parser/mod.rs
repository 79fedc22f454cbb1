//! Result-file parsing: raw report text to [`BenchmarkRun`].

mod cpu;
mod dates;
mod fields;
mod table;

use std::fmt;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fetcher::RawResultDocument;
use crate::model::BenchmarkRun;

pub(crate) use cpu::has_both_vendor_tokens;
pub use cpu::{classify_os, classify_vendor_and_class, format_cpu_enabled, parse_cpu_enabled, CpuEnabled};
pub use dates::{parse_month_year, parse_month_year_with, DateError, TwoDigitYears};
pub use fields::{Field, LabeledFields, Section};

use table::{measurements, overall_score, parse_count, parse_number, scan_table, TableProblem};

const EXCERPT_MAX_CHARS: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    MissingField,
    MalformedValue,
    AmbiguousValue,
    TableShapeError,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Why a document could not become a [`BenchmarkRun`]. `excerpt` is always a
/// verbatim substring of the document body.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{result_id}: {reason} in field {field:?}: {excerpt:?}")]
pub struct ParseFailure {
    pub result_id: String,
    pub field: String,
    pub excerpt: String,
    pub reason: FailureReason,
}

fn excerpt(s: &str) -> String {
    let s = s.trim();
    match s.char_indices().nth(EXCERPT_MAX_CHARS) {
        Some((cut, _)) => s[..cut].to_string(),
        None => s.to_string(),
    }
}

/// Decodes report bytes as UTF-8, falling back to Windows-1252 (a Latin-1
/// superset) for legacy files.
pub fn decode_report(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_string(),
        Err(_) => encoding_rs::WINDOWS_1252.decode(bytes).0.into_owned(),
    }
}

static NOT_ACCEPTED_BANNER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(non-?compliant|not\s+accepted|withdrawn)\b").unwrap()
});

/// In-document non-acceptance banner, searched above the results table only.
fn banner_marker(body: &str) -> Option<String> {
    let head = body
        .find("Benchmark Results Summary")
        .map_or(body, |pos| &body[..pos]);
    NOT_ACCEPTED_BANNER
        .find(head)
        .map(|m| m.as_str().to_string())
}

/// Parsing knobs; the default matches the corpus conventions.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub two_digit_years: TwoDigitYears,
}

struct Ctx<'a> {
    id: &'a str,
    body: &'a str,
}

impl Ctx<'_> {
    fn fail(&self, field: &str, excerpt_src: &str, reason: FailureReason) -> ParseFailure {
        ParseFailure {
            result_id: self.id.to_string(),
            field: field.to_string(),
            excerpt: excerpt(excerpt_src),
            reason,
        }
    }

    fn missing(&self, field: &str) -> ParseFailure {
        let first = self.body.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        self.fail(field, first, FailureReason::MissingField)
    }
}

pub fn parse_run(doc: &RawResultDocument) -> Result<BenchmarkRun, ParseFailure> {
    parse_run_with(doc, ParseOptions::default())
}

pub fn parse_run_with(doc: &RawResultDocument, opts: ParseOptions) -> Result<BenchmarkRun, ParseFailure> {
    parse_body(
        &doc.reference.result_id,
        &doc.body,
        doc.reference.publication_marker.as_deref(),
        opts,
    )
}

/// Parses report text directly; `listing_marker` is the annotation the
/// result index attached to the entry, if any.
pub fn parse_body(
    result_id: &str,
    body: &str,
    listing_marker: Option<&str>,
    opts: ParseOptions,
) -> Result<BenchmarkRun, ParseFailure> {
    let ctx = Ctx { id: result_id, body };
    if body.trim().is_empty() {
        return Err(ctx.fail("body", "", FailureReason::MissingField));
    }
    let fields = LabeledFields::extract(body);

    let raw_table = scan_table(body);
    let levels = measurements(&raw_table).map_err(|p| match p {
        TableProblem::Shape(line, msg) => {
            log::debug!("{result_id}: {msg}");
            ctx.fail("levels", line, FailureReason::TableShapeError)
        }
        TableProblem::Value(line, msg) => {
            log::debug!("{result_id}: {msg}");
            ctx.fail("levels", line, FailureReason::MalformedValue)
        }
    })?;
    let (idle_line, idle_raw) = raw_table.idle.ok_or_else(|| ctx.missing("idle_power_w"))?;
    let idle_power_w = parse_number(idle_raw)
        .filter(|&p| p > 0.0)
        .ok_or_else(|| ctx.fail("idle_power_w", idle_line, FailureReason::MalformedValue))?;
    let reported_overall_efficiency =
        overall_score(body).ok_or_else(|| ctx.missing("reported_overall_efficiency"))?;

    let cpu_names = {
        let mut names: Vec<String> = Vec::new();
        for n in fields.all_in("CPU Name", |s| matches!(s, Section::Sut(_))) {
            if !n.is_empty() && !names.iter().any(|x| x == n) {
                names.push(n.to_string());
            }
        }
        names
    };
    let cpu_name = cpu_names.first().cloned().ok_or_else(|| ctx.missing("cpu_name"))?;
    let (vendor, marketing_class) = classify_vendor_and_class(&cpu_name);

    let enabled_raw = fields.sut("CPU(s) Enabled").ok_or_else(|| ctx.missing("cpu_enabled"))?;
    let enabled = parse_cpu_enabled(enabled_raw)
        .ok_or_else(|| ctx.fail("cpu_enabled", enabled_raw, FailureReason::MalformedValue))?;

    let nodes = node_count(&fields);
    let per_node = |aggregate: &str| -> Option<u64> {
        let total = fields.aggregate(aggregate).and_then(parse_count)?;
        let n = u64::from(nodes.filter(|&n| n > 0)?);
        (total % n == 0).then_some(total / n)
    };
    let threads_total = fields
        .sut("Hardware Threads")
        .and_then(leading_count)
        .or_else(|| per_node("# of Threads"))
        .and_then(|v| u32::try_from(v).ok());

    let cpu_nominal_mhz = fields
        .sut("CPU Frequency (MHz)")
        .and_then(parse_number)
        .filter(|&v| v > 0.0)
        .or_else(|| fields.sut("CPU Characteristics").and_then(cpu::frequency_in_text))
        .or_else(|| cpu::frequency_in_text(&cpu_name));

    let memory_gb = fields
        .sut("Memory Amount (GB)")
        .and_then(parse_number)
        .or_else(|| per_node("Total RAM (GB)").map(|v| v as f64));

    let os_name = fields
        .sut("Operating System (OS)")
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ctx.missing("os_name"))?
        .to_string();
    let jvm_name = fields
        .sut("JVM Version")
        .filter(|s| !s.is_empty())
        .or_else(|| fields.sut("JVM Vendor").filter(|s| !s.is_empty()))
        .ok_or_else(|| ctx.missing("jvm_name"))?
        .to_string();

    let date = |label: &str| dates::date_field(fields.header(label), opts.two_digit_years);
    let publication_marker = listing_marker
        .map(str::to_string)
        .or_else(|| banner_marker(body));

    Ok(BenchmarkRun {
        result_id: result_id.to_string(),
        accepted: publication_marker.is_none(),
        publication_marker,
        test_date: date("Test Date"),
        submission_date: date("Publication"),
        hw_availability: date("Hardware Availability"),
        sw_availability: date("Software Availability"),
        vendor,
        marketing_class,
        cpu_name,
        cpu_names,
        cpu_nominal_mhz,
        nodes,
        sockets: enabled.sockets,
        cores_total: enabled.cores_total,
        threads_total,
        cores_per_chip: enabled.cores_per_chip,
        os_family: classify_os(&os_name),
        os_name,
        jvm_name,
        memory_gb,
        levels,
        idle_power_w,
        reported_overall_efficiency,
    })
}

fn leading_count(s: &str) -> Option<u64> {
    let digits: String = s
        .trim()
        .chars()
        .take_while(|c| c.is_ascii_digit() || *c == ',')
        .collect();
    parse_count(&digits)
}

/// `# of Nodes` from the aggregate block, else the sum of per-set
/// `# of Identical Nodes`.
fn node_count(fields: &LabeledFields<'_>) -> Option<u32> {
    if let Some(n) = fields.aggregate("# of Nodes").and_then(leading_count) {
        return u32::try_from(n).ok();
    }
    let per_set = fields.all_in("# of Identical Nodes", |s| matches!(s, Section::Sut(_)));
    if per_set.is_empty() {
        return None;
    }
    per_set
        .into_iter()
        .map(|v| leading_count(v).and_then(|n| u32::try_from(n).ok()))
        .sum()
}

/// Parses every document, keeping successes and failures apart. Order of
/// both outputs follows the input order.
pub fn parse_batch(docs: &[RawResultDocument], opts: ParseOptions) -> (Vec<BenchmarkRun>, Vec<ParseFailure>) {
    let results: Vec<Result<BenchmarkRun, ParseFailure>> =
        docs.par_iter().map(|d| parse_run_with(d, opts)).collect();
    let mut runs = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(run) => runs.push(run),
            Err(f) => failures.push(f),
        }
    }
    (runs, failures)
}
