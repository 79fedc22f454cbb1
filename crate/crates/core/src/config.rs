//! Versioned pipeline configuration (TOML).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::MonthYear;

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_INDEX_URL: &str = "https://www.spec.org/power_ssj2008/results/power_ssj2008.html";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unsupported config_version {found} (expected {CONFIG_VERSION})")]
    Version { found: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Output kinds the analyze step can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emission {
    Table,
    Records,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FetchConfig {
    pub workers: usize,
    pub delay_ms: u64,
    pub retries: u32,
    pub timeout_secs: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            delay_ms: 500,
            retries: 3,
            timeout_secs: 60,
        }
    }
}

/// Thresholds for the consistency and comparability stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Dates before this month are implausible.
    pub earliest_date: MonthYear,
    /// Dates after this month are implausible; unset means the cutoff month.
    pub latest_date: Option<MonthYear>,
    /// Largest allowed gap from test date to hardware availability.
    pub max_hw_after_test_months: i64,
    /// Allowed hardware threads per core.
    pub threads_per_core: BTreeSet<u32>,
    pub max_cores_per_chip: u32,
    pub max_nodes: u32,
    pub max_sockets: u32,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            earliest_date: MonthYear { year: 2004, month: 1 },
            latest_date: None,
            max_hw_after_test_months: 24,
            threads_per_core: [1, 2].into_iter().collect(),
            max_cores_per_chip: 256,
            max_nodes: 1,
            max_sockets: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Population (true) or sample (false) standard deviation.
    pub population_std: bool,
    /// Eras compared for per-socket power: `[up_to_year, since_year]`.
    pub power_eras: [i32; 2],
    /// Year splitting feature-share periods (`before` / `from`).
    pub share_split_year: i32,
    pub correlation_since_year: i32,
    pub top_k: usize,
    /// Inclusive `[from, to]` year ranges for submission rates.
    pub submission_ranges: Vec<[i32; 2]>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            population_std: true,
            power_eras: [2010, 2022],
            share_split_year: 2018,
            correlation_since_year: 2021,
            top_k: 100,
            submission_ranges: vec![[2005, 2023], [2013, 2017]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub config_version: u32,
    pub index_url: String,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    pub cutoff: NaiveDate,
    pub formats: BTreeSet<Emission>,
    pub jobs: Option<usize>,
    pub fetch: FetchConfig,
    pub filters: FilterConfig,
    pub analysis: AnalysisConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            config_version: CONFIG_VERSION,
            index_url: DEFAULT_INDEX_URL.to_string(),
            cache_dir: PathBuf::from("cache"),
            output_dir: PathBuf::from("out"),
            cutoff: NaiveDate::from_ymd_opt(2024, 6, 30).unwrap(),
            formats: [Emission::Table, Emission::Records].into_iter().collect(),
            jobs: None,
            fetch: FetchConfig::default(),
            filters: FilterConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        if cfg.config_version != CONFIG_VERSION {
            return Err(ConfigError::Version {
                found: cfg.config_version,
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks cross-field invariants once flags have been merged in.
    pub fn validate(&self, today: NaiveDate) -> Result<(), ConfigError> {
        if self.cutoff > today {
            return Err(ConfigError::Invalid(format!(
                "cutoff {} lies in the future",
                self.cutoff
            )));
        }
        if same_path(&self.cache_dir, &self.output_dir) {
            return Err(ConfigError::Invalid(format!(
                "output_dir and cache_dir must differ (both {})",
                self.output_dir.display()
            )));
        }
        if self.filters.threads_per_core.is_empty() {
            return Err(ConfigError::Invalid("filters.threads_per_core is empty".into()));
        }
        Ok(())
    }

    /// Filter thresholds with the upper date bound resolved from the cutoff.
    pub fn resolved_filters(&self) -> FilterConfig {
        let mut f = self.filters.clone();
        if f.latest_date.is_none() {
            f.latest_date = MonthYear::new(
                chrono::Datelike::year(&self.cutoff),
                chrono::Datelike::month(&self.cutoff),
            );
        }
        f
    }
}

fn same_path(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a.components().eq(b.components()),
    }
}
