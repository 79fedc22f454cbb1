//! Parsed representation of a single power_ssj2008 run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A calendar month, the resolution of every date printed in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthYear {
    pub year: i32,
    pub month: u32,
}

impl MonthYear {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    /// Months since year 0, handy for month arithmetic.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn months_until(self, later: MonthYear) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

impl fmt::Display for MonthYear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthYear {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (y, m) = s
            .split_once('-')
            .ok_or_else(|| format!("expected YYYY-MM, got {s:?}"))?;
        let year = y.parse().map_err(|_| format!("bad year in {s:?}"))?;
        let month = m.parse().map_err(|_| format!("bad month in {s:?}"))?;
        MonthYear::new(year, month).ok_or_else(|| format!("month out of range in {s:?}"))
    }
}

impl Serialize for MonthYear {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthYear {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One of the four dates attached to a run.
///
/// Ambiguous and malformed spellings are kept rather than rejected so the
/// consistency filter can charge them to the right stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateField {
    Known(MonthYear),
    Ambiguous(String),
    Malformed(String),
    Missing,
}

impl DateField {
    pub fn known(&self) -> Option<MonthYear> {
        match self {
            DateField::Known(m) => Some(*m),
            _ => None,
        }
    }
}

impl fmt::Display for DateField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateField::Known(m) => write!(f, "{m}"),
            DateField::Ambiguous(raw) => write!(f, "ambiguous {raw:?}"),
            DateField::Malformed(raw) => write!(f, "malformed {raw:?}"),
            DateField::Missing => f.write_str("missing"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vendor {
    Intel,
    #[serde(rename = "AMD")]
    Amd,
    Other,
}

impl fmt::Display for Vendor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vendor::Intel => "Intel",
            Vendor::Amd => "AMD",
            Vendor::Other => "Other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MarketingClass {
    Xeon,
    Opteron,
    #[serde(rename = "EPYC")]
    Epyc,
    Other,
}

impl fmt::Display for MarketingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarketingClass::Xeon => "Xeon",
            MarketingClass::Opteron => "Opteron",
            MarketingClass::Epyc => "EPYC",
            MarketingClass::Other => "Other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OsFamily {
    Windows,
    Linux,
    Other,
}

impl fmt::Display for OsFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Target load in percent. `0` denotes the active-idle interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoadLevel(u8);

impl LoadLevel {
    pub const FULL: LoadLevel = LoadLevel(100);
    pub const ACTIVE_IDLE: LoadLevel = LoadLevel(0);

    /// The ten graduated target loads, highest first, as they appear in a report.
    pub const TARGETS: [LoadLevel; 10] = [
        LoadLevel(100),
        LoadLevel(90),
        LoadLevel(80),
        LoadLevel(70),
        LoadLevel(60),
        LoadLevel(50),
        LoadLevel(40),
        LoadLevel(30),
        LoadLevel(20),
        LoadLevel(10),
    ];

    pub fn from_percent(pct: u8) -> Option<Self> {
        (pct <= 100 && pct.is_multiple_of(10)).then_some(LoadLevel(pct))
    }

    pub fn percent(self) -> u8 {
        self.0
    }

    pub fn fraction(self) -> f64 {
        f64::from(self.0) / 100.0
    }

    pub fn is_active_idle(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for LoadLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_active_idle() {
            f.write_str("idle")
        } else {
            write!(f, "{}%", self.0)
        }
    }
}

impl FromStr for LoadLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("idle") || t.eq_ignore_ascii_case("active idle") {
            return Ok(LoadLevel::ACTIVE_IDLE);
        }
        let digits = t.trim_end_matches('%');
        digits
            .parse::<u8>()
            .ok()
            .and_then(LoadLevel::from_percent)
            .ok_or_else(|| format!("not a load level: {s:?}"))
    }
}

/// One row of the results summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadLevelMeasurement {
    #[serde(rename = "target_load_pct")]
    pub target_load: LoadLevel,
    pub ssj_ops: u64,
    pub avg_power_w: f64,
}

/// A fully parsed result file.
///
/// Field order is the record order on disk; keep it stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRun {
    pub result_id: String,
    pub accepted: bool,
    /// Raw non-acceptance marker from the listing or the report banner.
    pub publication_marker: Option<String>,
    pub test_date: DateField,
    pub submission_date: DateField,
    pub hw_availability: DateField,
    pub sw_availability: DateField,
    pub vendor: Vendor,
    pub marketing_class: MarketingClass,
    pub cpu_name: String,
    /// Every distinct CPU name declared by the SUT sets, in document order.
    pub cpu_names: Vec<String>,
    pub cpu_nominal_mhz: Option<f64>,
    pub nodes: Option<u32>,
    /// Chips per node.
    pub sockets: u32,
    /// Cores per node.
    pub cores_total: u32,
    /// Hardware threads per node.
    pub threads_total: Option<u32>,
    pub cores_per_chip: u32,
    pub os_name: String,
    pub os_family: OsFamily,
    pub jvm_name: String,
    pub memory_gb: Option<f64>,
    pub levels: Vec<LoadLevelMeasurement>,
    pub idle_power_w: f64,
    pub reported_overall_efficiency: f64,
}

impl BenchmarkRun {
    pub fn level(&self, level: LoadLevel) -> Option<&LoadLevelMeasurement> {
        self.levels.iter().find(|m| m.target_load == level)
    }

    /// Average power at a target load; the idle sentinel maps to the idle measurement.
    pub fn power_at(&self, level: LoadLevel) -> Option<f64> {
        if level.is_active_idle() {
            Some(self.idle_power_w)
        } else {
            self.level(level).map(|m| m.avg_power_w)
        }
    }

    pub fn dates(&self) -> [(&'static str, &DateField); 4] {
        [
            ("test_date", &self.test_date),
            ("submission_date", &self.submission_date),
            ("hw_availability", &self.hw_availability),
            ("sw_availability", &self.sw_availability),
        ]
    }
}
