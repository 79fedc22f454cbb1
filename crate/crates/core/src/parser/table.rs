use std::sync::LazyLock;

use regex::Regex;

use crate::model::{LoadLevel, LoadLevelMeasurement};

static LEVEL_ROW: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^\s*(\d{1,3})\s*%\s+(?:\d+(?:\.\d+)?\s*%\s+)?([\d,]+)\s+([\d,]+(?:\.\d+)?)\s+([\d,]+(?:\.\d+)?)\s*$",
    )
    .unwrap()
});
static IDLE_ROW: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*Active\s+Idle\s+([\d,]+)\s+([\d,]+(?:\.\d+)?)(?:\s+([\d,]+(?:\.\d+)?))?\s*$")
        .unwrap()
});
static SUM_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)(?:∑|Σ|sum\s*\()\s*ssj_ops\s*\)?\s*/\s*(?:∑|Σ|sum\s*\()\s*power\s*\)?\s*=\s*([\d,]+(?:\.\d+)?)",
    )
    .unwrap()
});
static HEADLINE_SCORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)=\s*([\d,]+(?:\.\d+)?)\s+overall\s+ssj_ops\s*/\s*watt").unwrap()
});

/// Strips thousands separators and a trailing unit suffix.
pub(crate) fn parse_number(raw: &str) -> Option<f64> {
    let cleaned: String = raw
        .trim()
        .trim_end_matches(|c: char| c.is_ascii_alphabetic() || c == '%')
        .trim()
        .chars()
        .filter(|&c| c != ',' && c != '_')
        .collect();
    if cleaned.is_empty() {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) fn parse_count(raw: &str) -> Option<u64> {
    let cleaned: String = raw.trim().chars().filter(|&c| c != ',').collect();
    cleaned.parse().ok()
}

/// A matched table row, borrowed from the body for error excerpts.
#[derive(Debug)]
pub(crate) struct RawRow<'a> {
    pub line: &'a str,
    pub level: u32,
    pub ssj_ops: &'a str,
    pub power: &'a str,
}

#[derive(Debug, Default)]
pub(crate) struct RawTable<'a> {
    pub rows: Vec<RawRow<'a>>,
    pub idle: Option<(&'a str, &'a str)>,
}

/// Collects the first contiguous block of load-level rows plus the idle row.
pub(crate) fn scan_table(body: &str) -> RawTable<'_> {
    let mut table = RawTable::default();
    let mut in_block = false;
    for line in body.lines() {
        if let Some(c) = LEVEL_ROW.captures(line) {
            if !in_block && !table.rows.is_empty() {
                // a second table further down is not ours
                continue;
            }
            in_block = true;
            table.rows.push(RawRow {
                line,
                level: c[1].parse().unwrap_or(u32::MAX),
                ssj_ops: c.get(2).unwrap().as_str(),
                power: c.get(3).unwrap().as_str(),
            });
            continue;
        }
        if let Some(c) = IDLE_ROW.captures(line) {
            if table.idle.is_none() {
                table.idle = Some((line, c.get(2).unwrap().as_str()));
            }
        }
        if in_block {
            in_block = false;
        }
    }
    table
}

pub(crate) enum TableProblem<'a> {
    Shape(&'a str, String),
    Value(&'a str, String),
}

/// Validates the block and returns the ten measurements ordered 100%..10%.
pub(crate) fn measurements<'a>(table: &RawTable<'a>) -> Result<Vec<LoadLevelMeasurement>, TableProblem<'a>> {
    let anchor = table.rows.first().map_or("", |r| r.line);
    let mut out: Vec<LoadLevelMeasurement> = Vec::with_capacity(10);
    for row in &table.rows {
        let level = u8::try_from(row.level)
            .ok()
            .and_then(LoadLevel::from_percent)
            .filter(|l| !l.is_active_idle())
            .ok_or_else(|| TableProblem::Shape(row.line, format!("unexpected target load {}%", row.level)))?;
        if out.iter().any(|m| m.target_load == level) {
            return Err(TableProblem::Shape(row.line, format!("duplicate target load {level}")));
        }
        let ssj_ops = parse_count(row.ssj_ops)
            .ok_or_else(|| TableProblem::Value(row.line, format!("bad ssj_ops {:?}", row.ssj_ops)))?;
        let avg_power_w = parse_number(row.power)
            .filter(|&p| p > 0.0)
            .ok_or_else(|| TableProblem::Value(row.line, format!("bad average power {:?}", row.power)))?;
        out.push(LoadLevelMeasurement { target_load: level, ssj_ops, avg_power_w });
    }
    if out.len() != LoadLevel::TARGETS.len() {
        return Err(TableProblem::Shape(
            anchor,
            format!("expected 10 load levels, found {}", out.len()),
        ));
    }
    out.sort_by_key(|m| std::cmp::Reverse(m.target_load));
    let full = out[0].ssj_ops;
    if let Some(m) = out.iter().find(|m| m.ssj_ops > full) {
        let line = table
            .rows
            .iter()
            .find(|r| u32::from(m.target_load.percent()) == r.level)
            .map_or(anchor, |r| r.line);
        return Err(TableProblem::Shape(
            line,
            format!("ssj_ops at {} exceeds the 100% level", m.target_load),
        ));
    }
    Ok(out)
}

/// The printed overall score, preferring the summary line under the table.
pub(crate) fn overall_score(body: &str) -> Option<f64> {
    SUM_LINE
        .captures(body)
        .or_else(|| HEADLINE_SCORE.captures(body))
        .and_then(|c| parse_number(&c[1]))
}
