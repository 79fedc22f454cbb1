//! Year × vendor aggregation, era comparisons, shares, rankings and
//! correlation scans over analyzed runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::{canonical_year, MissingCanonicalDate};
use crate::metrics::{compute_metrics, MetricsError, RunMetrics};
use crate::model::{BenchmarkRun, Vendor};
use crate::scalar::Scalar;
use crate::stats::{mean, pearson, std_dev, DistributionSummary, StdKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrendError {
    #[error("no runs fall in {0}")]
    EmptySelection(YearRange),
    #[error("k = {k} exceeds the population of {population}")]
    KTooLarge { k: usize, population: usize },
    #[error("correlation scan needs at least 3 runs, got {0}")]
    TooFewRuns(usize),
    #[error("empty year range {0}")]
    EmptyRange(YearRange),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Date(#[from] MissingCanonicalDate),
}

/// A parsed run with its timeline key and derived metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedRun<T> {
    pub run: BenchmarkRun,
    pub year: i32,
    pub metrics: RunMetrics<T>,
}

impl<T: Scalar> AnalyzedRun<T> {
    pub fn new(run: BenchmarkRun) -> Result<Self, TrendError> {
        let year = canonical_year(&run)?;
        let metrics = compute_metrics(&run)?;
        Ok(Self { run, year, metrics })
    }

    pub fn vendor(&self) -> Vendor {
        self.run.vendor
    }
}

/// Inclusive range of canonical years; open ends are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub from: Option<i32>,
    pub to: Option<i32>,
}

impl YearRange {
    pub const ALL: YearRange = YearRange { from: None, to: None };

    /// Years `<= year`.
    pub fn up_to(year: i32) -> Self {
        Self { from: None, to: Some(year) }
    }

    /// Years `>= year`.
    pub fn since(year: i32) -> Self {
        Self { from: Some(year), to: None }
    }

    /// Years `< year`.
    pub fn before(year: i32) -> Self {
        Self { from: None, to: Some(year - 1) }
    }

    pub fn between(from: i32, to: i32) -> Self {
        Self { from: Some(from), to: Some(to) }
    }

    pub fn single(year: i32) -> Self {
        Self::between(year, year)
    }

    pub fn contains(&self, year: i32) -> bool {
        self.from.is_none_or(|f| year >= f) && self.to.is_none_or(|t| year <= t)
    }

    /// Number of calendar years covered, when both ends are bounded.
    pub fn len(&self) -> Option<i64> {
        match (self.from, self.to) {
            (Some(f), Some(t)) => Some((i64::from(t) - i64::from(f) + 1).max(0)),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.from, self.to) {
            (None, None) => f.write_str("all years"),
            (Some(a), None) => write!(f, "{a}+"),
            (None, Some(b)) => write!(f, "<={b}"),
            (Some(a), Some(b)) if a == b => write!(f, "{a}"),
            (Some(a), Some(b)) => write!(f, "{a}-{b}"),
        }
    }
}

pub fn select_years<T>(runs: &[AnalyzedRun<T>], range: YearRange) -> Vec<&AnalyzedRun<T>> {
    runs.iter().filter(|r| range.contains(r.year)).collect()
}

/// One summary per non-empty (year, vendor) bin. The selector may yield
/// several samples per run (pooling several load levels); all go into the
/// run's bin.
pub fn bin_by_year_vendor<T: Scalar>(
    runs: &[AnalyzedRun<T>],
    selector: impl Fn(&AnalyzedRun<T>) -> Vec<T>,
    std_kind: StdKind,
) -> BTreeMap<(i32, Vendor), DistributionSummary<T>> {
    let mut bins: BTreeMap<(i32, Vendor), Vec<T>> = BTreeMap::new();
    for r in runs {
        let samples = selector(r);
        if !samples.is_empty() {
            bins.entry((r.year, r.vendor())).or_default().extend(samples);
        }
    }
    bins.into_iter()
        .filter_map(|(k, v)| DistributionSummary::from_values(&v, std_kind).map(|s| (k, s)))
        .collect()
}

/// Vendor-pooled summary per year.
pub fn bin_by_year<T: Scalar>(
    runs: &[AnalyzedRun<T>],
    selector: impl Fn(&AnalyzedRun<T>) -> Vec<T>,
    std_kind: StdKind,
) -> BTreeMap<i32, DistributionSummary<T>> {
    let mut bins: BTreeMap<i32, Vec<T>> = BTreeMap::new();
    for r in runs {
        bins.entry(r.year).or_default().extend(selector(r));
    }
    bins.into_iter()
        .filter_map(|(k, v)| DistributionSummary::from_values(&v, std_kind).map(|s| (k, s)))
        .collect()
}

pub fn era_mean<T: Scalar>(
    runs: &[AnalyzedRun<T>],
    era: YearRange,
    selector: impl Fn(&AnalyzedRun<T>) -> T,
) -> Result<T, TrendError> {
    let values: Vec<T> = select_years(runs, era).into_iter().map(selector).collect();
    mean(&values).ok_or(TrendError::EmptySelection(era))
}

/// Vendor counts among the `k` runs with the highest metric. Ties are broken
/// by ascending result id.
pub fn top_k_vendor_counts<T: Scalar>(
    runs: &[AnalyzedRun<T>],
    selector: impl Fn(&AnalyzedRun<T>) -> T,
    k: usize,
) -> Result<BTreeMap<Vendor, usize>, TrendError> {
    if k > runs.len() {
        return Err(TrendError::KTooLarge {
            k,
            population: runs.len(),
        });
    }
    let mut ranked: Vec<(T, &AnalyzedRun<T>)> = runs.iter().map(|r| (selector(r), r)).collect();
    ranked.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.1.run.result_id.cmp(&b.1.run.result_id))
    });
    let mut counts = BTreeMap::new();
    for (_, r) in ranked.into_iter().take(k) {
        *counts.entry(r.vendor()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Category fractions, per canonical year (`Some(year)`) or pooled over the
/// whole slice (`None`). Fractions in each group sum to one.
pub fn feature_share<T: Scalar, R>(
    runs: &[R],
    year_of: impl Fn(&R) -> i32,
    feature: impl Fn(&R) -> String,
    per_year: bool,
) -> BTreeMap<Option<i32>, BTreeMap<String, T>> {
    let mut counts: BTreeMap<Option<i32>, BTreeMap<String, usize>> = BTreeMap::new();
    for r in runs {
        let key = per_year.then(|| year_of(r));
        *counts.entry(key).or_default().entry(feature(r)).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(k, cats)| {
            let total = T::of_usize(cats.values().sum());
            let shares = cats
                .into_iter()
                .map(|(c, n)| (c, T::of_usize(n) / total))
                .collect();
            (k, shares)
        })
        .collect()
}

/// Runs per year over a bounded inclusive range.
pub fn submission_rate<T: Scalar>(years: impl IntoIterator<Item = i32>, range: YearRange) -> Result<T, TrendError> {
    let len = match range.len() {
        Some(n) if n > 0 => n,
        _ => return Err(TrendError::EmptyRange(range)),
    };
    let count = years.into_iter().filter(|&y| range.contains(y)).count();
    Ok(T::of_usize(count) / T::of(len as f64))
}

type Selector<'a, T> = Box<dyn Fn(&AnalyzedRun<T>) -> Option<T> + 'a>;

/// A numeric run feature for the correlation scan.
pub struct Feature<'a, T> {
    pub name: &'a str,
    pub select: Selector<'a, T>,
}

impl<'a, T> Feature<'a, T> {
    pub fn new(name: &'a str, select: impl Fn(&AnalyzedRun<T>) -> Option<T> + 'a) -> Self {
        Self {
            name,
            select: Box::new(select),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats<T> {
    pub n: usize,
    pub mean: T,
    pub std: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationScan<T> {
    pub features: Vec<String>,
    /// Runs with every feature defined; the matrix is computed over these.
    pub complete_runs: usize,
    /// Symmetric; `None` where a feature has zero variance.
    pub matrix: Vec<Vec<Option<T>>>,
    /// Per vendor, per feature (same order as `features`).
    pub per_vendor: BTreeMap<Vendor, Vec<Option<FeatureStats<T>>>>,
}

impl<T: Scalar> CorrelationScan<T> {
    pub fn coefficient(&self, a: &str, b: &str) -> Option<T> {
        let i = self.features.iter().position(|f| f == a)?;
        let j = self.features.iter().position(|f| f == b)?;
        self.matrix[i][j]
    }

    pub fn vendor_stats(&self, vendor: Vendor, feature: &str) -> Option<FeatureStats<T>> {
        let i = self.features.iter().position(|f| f == feature)?;
        self.per_vendor.get(&vendor)?.get(i).copied().flatten()
    }
}

pub fn correlation_scan<T: Scalar>(
    runs: &[AnalyzedRun<T>],
    features: &[Feature<'_, T>],
    std_kind: StdKind,
) -> Result<CorrelationScan<T>, TrendError> {
    if runs.len() < 3 {
        return Err(TrendError::TooFewRuns(runs.len()));
    }
    let rows: Vec<Vec<Option<T>>> = runs
        .iter()
        .map(|r| features.iter().map(|f| (f.select)(r)).collect())
        .collect();
    let complete: Vec<Vec<T>> = rows
        .iter()
        .filter_map(|row| row.iter().copied().collect::<Option<Vec<T>>>())
        .collect();
    let column = |j: usize| -> Vec<T> { complete.iter().map(|row| row[j]).collect() };

    let n = features.len();
    let mut matrix = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i..n {
            let r = pearson(&column(i), &column(j));
            let r = if i == j { r.map(|_| T::one()) } else { r };
            matrix[i][j] = r;
            matrix[j][i] = r;
        }
    }

    let mut per_vendor: BTreeMap<Vendor, Vec<Option<FeatureStats<T>>>> = BTreeMap::new();
    let mut vendors: Vec<Vendor> = runs.iter().map(|r| r.vendor()).collect();
    vendors.sort();
    vendors.dedup();
    for v in vendors {
        let stats = (0..n)
            .map(|j| {
                let xs: Vec<T> = runs
                    .iter()
                    .zip(&rows)
                    .filter(|(r, _)| r.vendor() == v)
                    .filter_map(|(_, row)| row[j])
                    .collect();
                Some(FeatureStats {
                    n: xs.len(),
                    mean: mean(&xs)?,
                    std: std_dev(&xs, std_kind)?,
                })
            })
            .collect();
        per_vendor.insert(v, stats);
    }

    Ok(CorrelationScan {
        features: features.iter().map(|f| f.name.to_string()).collect(),
        complete_runs: complete.len(),
        matrix,
        per_vendor,
    })
}
