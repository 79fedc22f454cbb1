use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::model::{DateField, MonthYear};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DateError {
    #[error("malformed date")]
    Malformed,
    #[error("ambiguous date")]
    Ambiguous,
}

/// How two-digit years such as `Feb-08` are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwoDigitYears {
    /// Report them as ambiguous.
    #[default]
    Reject,
    /// Interpret `yy` as `century + yy`.
    Century(i32),
}

static MONTH_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Za-z]+)\.?[\s,/\-]*(\d{4})$").unwrap());
static MONTH_DAY_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Za-z]+)\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})$").unwrap());
static DAY_MONTH_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,2})[\s\-]+([A-Za-z]+)\.?,?[\s\-]+(\d{4})$").unwrap());
static ISO: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{4})-(\d{1,2})(?:-(\d{1,2}))?$").unwrap());
static NUMERIC_MONTH_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,2})\s*[-/.]\s*(\d{4})$").unwrap());
static SHORT_YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Za-z]+)\.?[\s,/\-']*(\d{2})$").unwrap());

fn month_from_name(name: &str) -> Option<u32> {
    const NAMES: [&str; 12] = [
        "january", "february", "march", "april", "may", "june", "july", "august", "september",
        "october", "november", "december",
    ];
    let lower = name.to_ascii_lowercase();
    if lower == "sept" {
        return Some(9);
    }
    NAMES.iter().position(|full| {
        lower.len() >= 3 && full.starts_with(lower.as_str())
    })
    .map(|i| i as u32 + 1)
}

fn build(year: &str, month: u32) -> Result<MonthYear, DateError> {
    let year: i32 = year.parse().map_err(|_| DateError::Malformed)?;
    MonthYear::new(year, month).ok_or(DateError::Malformed)
}

/// Parses the month-resolution dates printed in result files.
///
/// Accepts `Feb-2023`, `February 2023`, `Feb 6, 2023`, `6 Feb 2023`,
/// `2023-02`, `2023-02-06` and `02/2023`. Two-digit years are ambiguous.
pub fn parse_month_year(text: &str) -> Result<MonthYear, DateError> {
    parse_month_year_with(text, TwoDigitYears::Reject)
}

pub fn parse_month_year_with(text: &str, two_digit: TwoDigitYears) -> Result<MonthYear, DateError> {
    let t = text.trim();
    if let Some(c) = MONTH_YEAR.captures(t) {
        let month = month_from_name(&c[1]).ok_or(DateError::Malformed)?;
        return build(&c[2], month);
    }
    if let Some(c) = MONTH_DAY_YEAR.captures(t) {
        let month = month_from_name(&c[1]).ok_or(DateError::Malformed)?;
        check_day(&c[2])?;
        return build(&c[3], month);
    }
    if let Some(c) = DAY_MONTH_YEAR.captures(t) {
        let month = month_from_name(&c[2]).ok_or(DateError::Malformed)?;
        check_day(&c[1])?;
        return build(&c[3], month);
    }
    if let Some(c) = ISO.captures(t) {
        let month: u32 = c[2].parse().map_err(|_| DateError::Malformed)?;
        if let Some(day) = c.get(3) {
            check_day(day.as_str())?;
        }
        return build(&c[1], month);
    }
    if let Some(c) = NUMERIC_MONTH_YEAR.captures(t) {
        let month: u32 = c[1].parse().map_err(|_| DateError::Malformed)?;
        return build(&c[2], month);
    }
    if let Some(c) = SHORT_YEAR.captures(t) {
        let month = month_from_name(&c[1]).ok_or(DateError::Malformed)?;
        return match two_digit {
            TwoDigitYears::Reject => Err(DateError::Ambiguous),
            TwoDigitYears::Century(base) => {
                let yy: i32 = c[2].parse().map_err(|_| DateError::Malformed)?;
                MonthYear::new(base + yy, month).ok_or(DateError::Malformed)
            }
        };
    }
    Err(DateError::Malformed)
}

fn check_day(day: &str) -> Result<(), DateError> {
    match day.parse::<u32>() {
        Ok(d) if (1..=31).contains(&d) => Ok(()),
        _ => Err(DateError::Malformed),
    }
}

/// Lifts a raw field value into a [`DateField`], keeping the raw text on failure.
pub(crate) fn date_field(raw: Option<&str>, two_digit: TwoDigitYears) -> DateField {
    match raw.map(str::trim).filter(|s| !s.is_empty()) {
        None => DateField::Missing,
        Some(s) => match parse_month_year_with(s, two_digit) {
            Ok(m) => DateField::Known(m),
            Err(DateError::Ambiguous) => DateField::Ambiguous(s.to_string()),
            Err(DateError::Malformed) => DateField::Malformed(s.to_string()),
        },
    }
}
