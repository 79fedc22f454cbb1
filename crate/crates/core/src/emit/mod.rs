//! Tables, record files and plots for an analysis bundle.
//!
//! Every artifact has a short key (`fig1` .. `fig6`, or the table name) that
//! `--only` selects on.

pub mod format;
pub mod svg;
mod table;

use std::collections::BTreeMap;

use crate::config::{Emission, PipelineConfig};
use crate::filters::canonical_year;
use crate::model::{BenchmarkRun, LoadLevel, OsFamily, Vendor};
use crate::pipeline::Analysis;
use crate::records::to_jsonl;
use crate::scalar::Scalar;
use crate::stats::{DistributionSummary, StdKind};
use crate::trends::{
    bin_by_year, bin_by_year_vendor, correlation_scan, era_mean, feature_share, select_years,
    submission_rate, top_k_vendor_counts, AnalyzedRun, Feature, YearRange,
};

use format::{one_decimal, opt, ratio};
use svg::{Plot, Series};
pub use table::{Population, Table};

/// Selectable artifact keys, in emission order.
pub const KEYS: [&str; 13] = [
    "filter_report",
    "exclusions",
    "records",
    "fig1",
    "submission_rates",
    "fig2",
    "power_eras",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "top_k",
    "correlation",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub key: &'static str,
    pub file_name: String,
    pub contents: String,
}

impl Artifact {
    fn table(key: &'static str, t: &Table) -> Self {
        Self {
            key,
            file_name: format!("{}.csv", t.name),
            contents: t.to_csv(),
        }
    }

    fn svg(key: &'static str, name: &str, plot: &Plot) -> Self {
        Self {
            key,
            file_name: format!("{name}.svg"),
            contents: plot.render(),
        }
    }

    /// True when `selector` names this artifact by key or file stem.
    pub fn matches(&self, selector: &str) -> bool {
        self.key == selector || self.file_name.rsplit_once('.').map(|(stem, _)| stem) == Some(selector)
    }
}

/// True when `selector` is a key or a table name [`bundle`] can produce.
pub fn is_known_selector(selector: &str) -> bool {
    KEYS.contains(&selector) || TABLE_NAMES.iter().any(|(_, n)| *n == selector)
}

const TABLE_NAMES: [(&str, &str); 15] = [
    ("filter_report", "filter_report"),
    ("exclusions", "exclusions"),
    ("records", "runs"),
    ("records", "parse_failures"),
    ("fig1", "fig1_feature_shares"),
    ("submission_rates", "submission_rates"),
    ("fig2", "fig2_socket_power"),
    ("power_eras", "power_eras"),
    ("fig3", "fig3_overall_efficiency"),
    ("fig4", "fig4_relative_efficiency"),
    ("fig5", "fig5_idle_fraction"),
    ("fig6", "fig6_eiq"),
    ("top_k", "top_k"),
    ("correlation", "correlation"),
    ("correlation", "correlation_features"),
];

/// Every artifact enabled by the configured formats, optionally restricted
/// to those matching one of `only`.
pub fn bundle<T: Scalar>(a: &Analysis<T>, cfg: &PipelineConfig, only: &[String]) -> Vec<Artifact> {
    let std_kind = if cfg.analysis.population_std { StdKind::Population } else { StdKind::Sample };
    let wanted = |key: &str| only.is_empty() || only.iter().any(|o| o == key || TABLE_NAMES.contains(&(key, o.as_str())));
    let tables = cfg.formats.contains(&Emission::Table);
    let svgs = cfg.formats.contains(&Emission::Svg);
    let mut out = Vec::new();
    let mut add = |key: &'static str, t: Table, plot: Option<Plot>| {
        if !wanted(key) {
            return;
        }
        if tables {
            out.push(Artifact::table(key, &t));
        }
        if let (true, Some(p)) = (svgs, plot) {
            out.push(Artifact::svg(key, &t.name, &p));
        }
    };

    add("filter_report", filter_report(a), None);
    add("exclusions", exclusions(a), None);
    let (t, p) = fig1_feature_shares(a, cfg.analysis.share_split_year);
    add("fig1", t, Some(p));
    add("submission_rates", submission_rates(a, &cfg.analysis.submission_ranges), None);
    let (t, p) = fig2_socket_power(a, std_kind);
    add("fig2", t, Some(p));
    add("power_eras", power_eras(a, cfg.analysis.power_eras), None);
    let (t, p) = fig3_overall_efficiency(a, std_kind);
    add("fig3", t, Some(p));
    let (t, p) = fig4_relative_efficiency(a, std_kind);
    add("fig4", t, Some(p));
    let (t, p) = fig5_idle_fraction(a, std_kind);
    add("fig5", t, Some(p));
    let (t, p) = fig6_eiq(a, std_kind);
    add("fig6", t, Some(p));
    add("top_k", top_k(a, cfg.analysis.top_k), None);
    let (matrix, features) = correlation(a, cfg.analysis.correlation_since_year, std_kind);
    add("correlation", matrix, None);
    add("correlation", features, None);

    if cfg.formats.contains(&Emission::Records) && wanted("records") {
        out.push(Artifact {
            key: "records",
            file_name: "runs.jsonl".into(),
            contents: to_jsonl(&a.comparable),
        });
        out.push(Artifact {
            key: "records",
            file_name: "parse_failures.jsonl".into(),
            contents: to_jsonl(&a.failures),
        });
    }
    if !only.is_empty() {
        out.retain(|art| only.iter().any(|o| art.matches(o)));
    }
    out
}

fn vendor_label(v: Vendor) -> String {
    v.to_string()
}

const SUMMARY_HEADER: [&str; 8] = ["n", "mean", "std", "min", "p25", "median", "p75", "max"];

fn summary_cells<T: Scalar>(s: &DistributionSummary<T>, f: fn(T) -> String) -> Vec<String> {
    vec![
        s.n.to_string(),
        f(s.mean),
        f(s.std),
        f(s.min),
        f(s.p25),
        f(s.median),
        f(s.p75),
        f(s.max),
    ]
}

fn with_summary<'a>(lead: &[&'a str]) -> Vec<&'a str> {
    lead.iter().copied().chain(SUMMARY_HEADER).collect()
}

fn parsed<T>(a: &Analysis<T>) -> Population {
    Population::Parsed(a.consistent.len())
}

fn comparable<T>(a: &Analysis<T>) -> Population {
    Population::Comparable(a.comparable.len())
}

fn vendor_series<T: Scalar>(bins: &BTreeMap<(i32, Vendor), DistributionSummary<T>>) -> Vec<Series> {
    let mut by_vendor: BTreeMap<Vendor, Vec<(f64, f64)>> = BTreeMap::new();
    for ((year, vendor), s) in bins {
        by_vendor.entry(*vendor).or_default().push((f64::from(*year), s.mean.as_f64()));
    }
    by_vendor
        .into_iter()
        .map(|(v, points)| Series { label: vendor_label(v), points })
        .collect()
}

fn plot(title: &str, y_label: &str, series: Vec<Series>, lines: bool) -> Plot {
    Plot {
        title: title.into(),
        x_label: "hardware availability year".into(),
        y_label: y_label.into(),
        series,
        lines,
    }
}

pub fn filter_report<T>(a: &Analysis<T>) -> Table {
    let mut t = Table::new(
        "filter_report",
        Population::Unfiltered(a.parsed),
        &["phase", "stage", "count"],
    );
    let row = |phase: &str, stage: &str, n: usize| vec![phase.to_string(), stage.to_string(), n.to_string()];
    t.push(row("input", "documents", a.documents));
    t.push(row("input", "parse_failures", a.failures.len()));
    t.push(row("consistency", "input", a.consistency.input_count));
    for (stage, n) in &a.consistency.per_stage_counts {
        t.push(row("consistency", &stage.to_string(), *n));
    }
    t.push(row("consistency", "retained", a.consistency.retained_count));
    t.push(row("comparability", "input", a.comparability.input_count));
    for (stage, n) in &a.comparability.per_stage_counts {
        t.push(row("comparability", &stage.to_string(), *n));
    }
    t.push(row("comparability", "retained", a.comparability.retained_count));
    t
}

pub fn exclusions<T>(a: &Analysis<T>) -> Table {
    let mut t = Table::new(
        "exclusions",
        Population::Unfiltered(a.parsed),
        &["result_id", "stage", "detail"],
    );
    for e in &a.exclusions {
        t.push(vec![e.result_id.clone(), e.stage.to_string(), e.detail.clone()]);
    }
    t
}

fn node_category(run: &BenchmarkRun) -> String {
    match run.nodes {
        Some(1) => "single".into(),
        Some(_) => "multi".into(),
        None => "unknown".into(),
    }
}

pub type CategoryOf = fn(&BenchmarkRun) -> String;

/// Feature selectors used for the share table, by name.
pub fn share_features() -> [(&'static str, CategoryOf); 3] {
    [
        ("os_family", |r| r.os_family.to_string()),
        ("vendor", |r| r.vendor.to_string()),
        ("nodes", node_category),
    ]
}

pub fn fig1_feature_shares<T: Scalar>(a: &Analysis<T>, split_year: i32) -> (Table, Plot) {
    let mut t = Table::new(
        "fig1_feature_shares",
        parsed(a),
        &["period", "feature", "category", "share", "runs"],
    );
    let dated: Vec<(i32, &BenchmarkRun)> = a
        .consistent
        .iter()
        .filter_map(|r| canonical_year(r).ok().map(|y| (y, r)))
        .collect();
    let before: Vec<(i32, &BenchmarkRun)> = dated.iter().copied().filter(|(y, _)| *y < split_year).collect();
    let from: Vec<(i32, &BenchmarkRun)> = dated.iter().copied().filter(|(y, _)| *y >= split_year).collect();
    let mut per_year_totals: BTreeMap<i32, usize> = BTreeMap::new();
    for (y, _) in &dated {
        *per_year_totals.entry(*y).or_default() += 1;
    }

    let mut plot_series = Vec::new();
    for (name, select) in share_features() {
        let yearly = feature_share::<T, _>(&dated, |p| p.0, |p| select(p.1), true);
        for (year, shares) in &yearly {
            let year = year.expect("per-year grouping");
            for (cat, share) in shares {
                t.push(vec![
                    year.to_string(),
                    name.into(),
                    cat.clone(),
                    ratio(*share),
                    per_year_totals[&year].to_string(),
                ]);
            }
        }
        for (label, group) in [(format!("before-{split_year}"), &before), (format!("from-{split_year}"), &from)] {
            let pooled = feature_share::<T, _>(group, |p| p.0, |p| select(p.1), false);
            if let Some(shares) = pooled.get(&None) {
                for (cat, share) in shares {
                    t.push(vec![label.clone(), name.into(), cat.clone(), ratio(*share), group.len().to_string()]);
                }
            }
        }
        let highlight = match name {
            "os_family" => OsFamily::Linux.to_string(),
            "vendor" => Vendor::Amd.to_string(),
            _ => "multi".to_string(),
        };
        plot_series.push(Series {
            label: format!("{name}={highlight}"),
            points: yearly
                .iter()
                .map(|(y, s)| {
                    let share = s.get(&highlight).copied().unwrap_or_else(T::zero);
                    (f64::from(y.expect("per-year grouping")), share.as_f64())
                })
                .collect(),
        });
    }
    (t, plot("Share of features", "share of runs", plot_series, true))
}

pub fn submission_rates<T: Scalar>(a: &Analysis<T>, ranges: &[[i32; 2]]) -> Table {
    let mut t = Table::new(
        "submission_rates",
        parsed(a),
        &["from", "to", "years", "runs", "runs_per_year"],
    );
    let years: Vec<i32> = a.consistent.iter().filter_map(|r| canonical_year(r).ok()).collect();
    for &[from, to] in ranges {
        let range = YearRange::between(from, to);
        let runs = years.iter().filter(|&&y| range.contains(y)).count();
        let rate = submission_rate::<T>(years.iter().copied(), range).ok();
        t.push(vec![
            from.to_string(),
            to.to_string(),
            range.len().unwrap_or(0).to_string(),
            runs.to_string(),
            opt(rate, ratio),
        ]);
    }
    t
}

fn socket_power<T: Scalar>(r: &AnalyzedRun<T>, level: LoadLevel) -> T {
    r.metrics.socket_power_at(level).unwrap_or_else(T::nan)
}

pub fn fig2_socket_power<T: Scalar>(a: &Analysis<T>, std_kind: StdKind) -> (Table, Plot) {
    let mut t = Table::new(
        "fig2_socket_power",
        comparable(a),
        &with_summary(&["year", "vendor", "load"]),
    );
    let mut series = Vec::new();
    for level in [LoadLevel::FULL, LoadLevel::ACTIVE_IDLE] {
        let bins = bin_by_year_vendor(&a.comparable, |r| vec![socket_power(r, level)], std_kind);
        for ((year, vendor), s) in &bins {
            let mut row = vec![year.to_string(), vendor_label(*vendor), level.to_string()];
            row.extend(summary_cells(s, one_decimal));
            t.push(row);
        }
        if level == LoadLevel::FULL {
            series = vendor_series(&bins);
        }
    }
    (t, plot("Power per socket at full load", "W per socket", series, false))
}

pub fn power_eras<T: Scalar>(a: &Analysis<T>, eras: [i32; 2]) -> Table {
    let early = YearRange::up_to(eras[0]);
    let late = YearRange::since(eras[1]);
    let mut t = Table::new(
        "power_eras",
        comparable(a),
        &["load", "early_era", "early_runs", "early_mean_w", "late_era", "late_runs", "late_mean_w", "ratio"],
    );
    let mut levels = LoadLevel::TARGETS.to_vec();
    levels.push(LoadLevel::ACTIVE_IDLE);
    for level in levels {
        let e = era_mean(&a.comparable, early, |r| socket_power(r, level)).ok();
        let l = era_mean(&a.comparable, late, |r| socket_power(r, level)).ok();
        let r = e.zip(l).map(|(e, l)| l / e);
        t.push(vec![
            level.to_string(),
            early.to_string(),
            select_years(&a.comparable, early).len().to_string(),
            opt(e, one_decimal),
            late.to_string(),
            select_years(&a.comparable, late).len().to_string(),
            opt(l, one_decimal),
            opt(r, ratio),
        ]);
    }
    t
}

pub fn fig3_overall_efficiency<T: Scalar>(a: &Analysis<T>, std_kind: StdKind) -> (Table, Plot) {
    let mut t = Table::new(
        "fig3_overall_efficiency",
        comparable(a),
        &with_summary(&["year", "vendor"]),
    );
    let bins = bin_by_year_vendor(&a.comparable, |r| vec![r.metrics.overall_efficiency], std_kind);
    for ((year, vendor), s) in &bins {
        let mut row = vec![year.to_string(), vendor_label(*vendor)];
        row.extend(summary_cells(s, one_decimal));
        t.push(row);
    }
    (t, plot("Overall efficiency", "ssj_ops per W", vendor_series(&bins), false))
}

/// Load levels pooled for the relative-efficiency distribution.
pub const POOLED_LEVELS: [u8; 4] = [60, 70, 80, 90];

pub fn pooled_relative<T: Scalar>(r: &AnalyzedRun<T>) -> Vec<T> {
    POOLED_LEVELS
        .iter()
        .filter_map(|&p| LoadLevel::from_percent(p).and_then(|l| r.metrics.relative_at(l)))
        .collect()
}

pub fn fig4_relative_efficiency<T: Scalar>(a: &Analysis<T>, std_kind: StdKind) -> (Table, Plot) {
    let mut t = Table::new(
        "fig4_relative_efficiency",
        comparable(a),
        &with_summary(&["year", "vendor", "loads"]),
    );
    let pooled = bin_by_year_vendor(&a.comparable, pooled_relative, std_kind);
    for ((year, vendor), s) in &pooled {
        let mut row = vec![year.to_string(), vendor_label(*vendor), "60-90%".into()];
        row.extend(summary_cells(s, ratio));
        t.push(row);
    }
    for level in LoadLevel::TARGETS.iter().rev().filter(|l| **l != LoadLevel::FULL) {
        let bins = bin_by_year_vendor(&a.comparable, |r| r.metrics.relative_at(*level).into_iter().collect(), std_kind);
        for ((year, vendor), s) in &bins {
            let mut row = vec![year.to_string(), vendor_label(*vendor), level.to_string()];
            row.extend(summary_cells(s, ratio));
            t.push(row);
        }
    }
    (t, plot("Relative efficiency at 60-90% load", "relative efficiency", vendor_series(&pooled), false))
}

pub fn fig5_idle_fraction<T: Scalar>(a: &Analysis<T>, std_kind: StdKind) -> (Table, Plot) {
    let mut t = Table::new(
        "fig5_idle_fraction",
        comparable(a),
        &with_summary(&["year", "vendor"]),
    );
    let bins = bin_by_year_vendor(&a.comparable, |r| vec![r.metrics.idle_fraction], std_kind);
    let pooled = bin_by_year(&a.comparable, |r| vec![r.metrics.idle_fraction], std_kind);
    for (year, s) in &pooled {
        let mut row = vec![year.to_string(), "all".into()];
        row.extend(summary_cells(s, ratio));
        t.push(row);
    }
    for ((year, vendor), s) in &bins {
        let mut row = vec![year.to_string(), vendor_label(*vendor)];
        row.extend(summary_cells(s, ratio));
        t.push(row);
    }
    let mut series = vendor_series(&bins);
    series.push(Series {
        label: "all".into(),
        points: pooled.iter().map(|(y, s)| (f64::from(*y), s.mean.as_f64())).collect(),
    });
    (t, plot("Idle power relative to full load", "idle fraction", series, false))
}

pub fn fig6_eiq<T: Scalar>(a: &Analysis<T>, std_kind: StdKind) -> (Table, Plot) {
    let mut t = Table::new(
        "fig6_eiq",
        comparable(a),
        &with_summary(&["year", "vendor", "flagged"]),
    );
    let bins = bin_by_year_vendor(&a.comparable, |r| vec![r.metrics.eiq], std_kind);
    for ((year, vendor), s) in &bins {
        let flagged = a
            .comparable
            .iter()
            .filter(|r| r.year == *year && r.vendor() == *vendor && !r.metrics.flags.is_empty())
            .count();
        let mut row = vec![year.to_string(), vendor_label(*vendor), flagged.to_string()];
        row.extend(summary_cells(s, ratio));
        t.push(row);
    }
    (t, plot("Extrapolated-idle quotient", "EIQ", vendor_series(&bins), false))
}

pub fn top_k<T: Scalar>(a: &Analysis<T>, k: usize) -> Table {
    let mut t = Table::new("top_k", comparable(a), &["metric", "k", "vendor", "runs"]);
    let k = k.min(a.comparable.len());
    if let Ok(counts) = top_k_vendor_counts(&a.comparable, |r| r.metrics.overall_efficiency, k) {
        for v in [Vendor::Intel, Vendor::Amd, Vendor::Other] {
            let n = counts.get(&v).copied().unwrap_or(0);
            t.push(vec!["overall_efficiency".into(), k.to_string(), vendor_label(v), n.to_string()]);
        }
    }
    t
}

/// Numeric run features for the correlation scan.
pub fn correlation_features<'a, T: Scalar>() -> Vec<Feature<'a, T>> {
    let u = |v: u32| Some(T::of(f64::from(v)));
    vec![
        Feature::new("sockets", move |r: &AnalyzedRun<T>| u(r.run.sockets)),
        Feature::new("cores_total", move |r: &AnalyzedRun<T>| u(r.run.cores_total)),
        Feature::new("threads_total", move |r: &AnalyzedRun<T>| r.run.threads_total.and_then(u)),
        Feature::new("cores_per_chip", move |r: &AnalyzedRun<T>| u(r.run.cores_per_chip)),
        Feature::new("nominal_ghz", |r: &AnalyzedRun<T>| r.run.cpu_nominal_mhz.map(|m| T::of(m / 1000.0))),
        Feature::new("memory_gb", |r: &AnalyzedRun<T>| r.run.memory_gb.map(T::of)),
        Feature::new("overall_efficiency", |r: &AnalyzedRun<T>| Some(r.metrics.overall_efficiency)),
        Feature::new("idle_fraction", |r: &AnalyzedRun<T>| Some(r.metrics.idle_fraction)),
        Feature::new("eiq", |r: &AnalyzedRun<T>| Some(r.metrics.eiq)),
        Feature::new("full_load_w_per_socket", |r: &AnalyzedRun<T>| r.metrics.socket_power_at(LoadLevel::FULL)),
    ]
}

pub fn correlation<T: Scalar>(a: &Analysis<T>, since: i32, std_kind: StdKind) -> (Table, Table) {
    let runs: Vec<AnalyzedRun<T>> = select_years(&a.comparable, YearRange::since(since))
        .into_iter()
        .cloned()
        .collect();
    let pop = Population::Comparable(runs.len());
    let mut matrix = Table::new("correlation", pop, &["feature_a", "feature_b", "pearson_r", "runs"]);
    let mut stats = Table::new("correlation_features", pop, &["vendor", "feature", "n", "mean", "std"]);
    let Ok(scan) = correlation_scan(&runs, &correlation_features(), std_kind) else {
        return (matrix, stats);
    };
    for (i, a_name) in scan.features.iter().enumerate() {
        for (j, b_name) in scan.features.iter().enumerate() {
            matrix.push(vec![
                a_name.clone(),
                b_name.clone(),
                opt(scan.matrix[i][j], ratio),
                scan.complete_runs.to_string(),
            ]);
        }
    }
    for (vendor, per_feature) in &scan.per_vendor {
        for (name, fs) in scan.features.iter().zip(per_feature) {
            stats.push(vec![
                vendor_label(*vendor),
                name.clone(),
                fs.map_or_else(|| "0".into(), |f| f.n.to_string()),
                opt(fs.map(|f| f.mean), ratio),
                opt(fs.map(|f| f.std), ratio),
            ]);
        }
    }
    (matrix, stats)
}

/// Plain-text overview of the headline numbers of an analysis.
pub fn headline<T: Scalar>(a: &Analysis<T>, cfg: &PipelineConfig) -> String {
    use std::fmt::Write as _;
    let c = &cfg.analysis;
    let mut s = String::new();
    let _ = writeln!(s, "documents            {}", a.documents);
    let _ = writeln!(s, "parsed               {} ({} failures)", a.parsed, a.failures.len());
    let stage_list = |r: &crate::filters::FilterReport| {
        r.per_stage_counts
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let _ = writeln!(s, "after consistency    {}  [{}]", a.consistency.retained_count, stage_list(&a.consistency));
    let _ = writeln!(s, "after comparability  {}  [{}]", a.comparability.retained_count, stage_list(&a.comparability));

    let _ = writeln!(s, "\nidle fraction, yearly mean over {}", comparable(a));
    for (year, sum) in bin_by_year(&a.comparable, |r| vec![r.metrics.idle_fraction], StdKind::Population) {
        let _ = writeln!(s, "  {year}  {}  (n={})", ratio(sum.mean), sum.n);
    }

    let _ = writeln!(s, "\nper-socket power era means over {}", comparable(a));
    let early = YearRange::up_to(c.power_eras[0]);
    let late = YearRange::since(c.power_eras[1]);
    for p in [100u8, 70, 20] {
        let level = LoadLevel::from_percent(p).expect("valid level");
        let e = era_mean(&a.comparable, early, |r| socket_power(r, level)).ok();
        let l = era_mean(&a.comparable, late, |r| socket_power(r, level)).ok();
        let _ = writeln!(
            s,
            "  {level:>4}  {early}: {} W   {late}: {} W   ratio {}",
            opt(e, one_decimal),
            opt(l, one_decimal),
            opt(e.zip(l).map(|(e, l)| l / e), ratio)
        );
    }

    let k = c.top_k.min(a.comparable.len());
    if let Ok(counts) = top_k_vendor_counts(&a.comparable, |r| r.metrics.overall_efficiency, k) {
        let list: Vec<String> = counts.iter().map(|(v, n)| format!("{v}={n}")).collect();
        let _ = writeln!(s, "\ntop {k} by overall efficiency: {}", list.join(", "));
    }

    let _ = writeln!(s, "\nfeature shares over {}", parsed(a));
    let dated: Vec<(i32, &BenchmarkRun)> = a
        .consistent
        .iter()
        .filter_map(|r| canonical_year(r).ok().map(|y| (y, r)))
        .collect();
    let split = c.share_split_year;
    for (name, select) in share_features() {
        for (label, range) in [(format!("before {split}"), YearRange::before(split)), (format!("from {split}"), YearRange::since(split))] {
            let group: Vec<_> = dated.iter().copied().filter(|(y, _)| range.contains(*y)).collect();
            if let Some(shares) = feature_share::<T, _>(&group, |p| p.0, |p| select(p.1), false).get(&None) {
                let list: Vec<String> = shares.iter().map(|(k, v)| format!("{k}={}", ratio(*v))).collect();
                let _ = writeln!(s, "  {name:<10} {label:<12} {}", list.join(", "));
            }
        }
    }
    let years: Vec<i32> = dated.iter().map(|(y, _)| *y).collect();
    for &[from, to] in &c.submission_ranges {
        if let Ok(rate) = submission_rate::<T>(years.iter().copied(), YearRange::between(from, to)) {
            let _ = writeln!(s, "  runs per year {from}-{to}: {}", ratio(rate));
        }
    }
    s
}
