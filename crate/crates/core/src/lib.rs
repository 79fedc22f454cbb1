//! Ingestion, parsing, filtering and trend analysis for published
//! SPECpower_ssj2008 result files.
//!
//! The numeric core ([`metrics`], [`stats`], [`trends`]) is generic over a
//! [`Scalar`]; the aliases below fix it to `f64`, which the pipeline uses.

pub mod config;
pub mod emit;
pub mod fetcher;
pub mod filters;
pub mod metrics;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod records;
pub mod scalar;
pub mod stats;
pub mod testing;
pub mod trends;

pub use config::{Emission, PipelineConfig};
pub use fetcher::{CorpusManifest, RawResultDocument, ResultReference};
pub use filters::{ExclusionRecord, FilterReport, Stage};
pub use metrics::{compute_metrics, MetricFlag, RunMetrics};
pub use model::{BenchmarkRun, DateField, LoadLevel, LoadLevelMeasurement, MarketingClass, MonthYear, OsFamily, Vendor};
pub use parser::{parse_run, FailureReason, ParseFailure};
pub use scalar::Scalar;
pub use stats::{DistributionSummary, StdKind};
pub use trends::{AnalyzedRun, CorrelationScan, YearRange};

pub type RunMetricsF64 = RunMetrics<f64>;
pub type AnalyzedRunF64 = AnalyzedRun<f64>;
pub type DistributionSummaryF64 = DistributionSummary<f64>;
pub type CorrelationScanF64 = CorrelationScan<f64>;
pub type RunMetricsF32 = RunMetrics<f32>;
