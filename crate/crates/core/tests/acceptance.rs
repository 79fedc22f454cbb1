//! Acceptance checks. Prints one PASS / FAIL / SKIP line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Criteria over the full June-2024 corpus need a synced cache directory in
//! `SPECPOWER_SNAPSHOT_DIR` (with its `manifest.tsv`); without it they are
//! reported as SKIP.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use specpower_core::config::PipelineConfig;
use specpower_core::emit;
use specpower_core::fetcher::{Cache, CorpusManifest, RawResultDocument};
use specpower_core::filters::{apply_stages, canonical_year, Stage, COMPARABILITY_STAGES, CONSISTENCY_STAGES};
use specpower_core::metrics::{
    compute_metrics, efficiency_at, eiq, extrapolated_idle, idle_fraction, overall_efficiency, relative_efficiency,
};
use specpower_core::parser::{decode_report, parse_body, ParseOptions};
use specpower_core::pipeline::{analyze, load_documents, write_bundle, Analysis};
use specpower_core::records::{read_jsonl, to_jsonl};
use specpower_core::stats::StdKind;
use specpower_core::testing::{synthetic_run, with_levels};
use specpower_core::trends::{
    bin_by_year, correlation_scan, era_mean, feature_share, submission_rate, top_k_vendor_counts, Feature,
};
use specpower_core::{AnalyzedRun, BenchmarkRun, Emission, LoadLevel, OsFamily, Vendor, YearRange};

const SNAPSHOT_ENV: &str = "SPECPOWER_SNAPSHOT_DIR";

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

fn within(label: &str, actual: f64, expected: f64, tol: f64) -> Check {
    let line = format!("{label} {actual:.4} (expected {expected} +/- {tol})");
    if (actual - expected).abs() <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn all(checks: Vec<Check>) -> Verdict {
    let (ok, bad): (Vec<_>, Vec<_>) = checks.into_iter().partition(Result::is_ok);
    let ok: Vec<String> = ok.into_iter().map(Result::unwrap).collect();
    let bad: Vec<String> = bad.into_iter().map(Result::unwrap_err).collect();
    if bad.is_empty() {
        Verdict::Pass(ok.join("; "))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn snapshot_config() -> PipelineConfig {
    PipelineConfig::default()
}

struct Snapshot {
    docs: Vec<RawResultDocument>,
    manifest: Option<CorpusManifest>,
    analysis: Analysis<f64>,
}

fn load_snapshot() -> Option<Result<Snapshot, String>> {
    let dir = std::env::var_os(SNAPSHOT_ENV)?;
    let dir = PathBuf::from(dir);
    Some((|| {
        let docs = load_documents(&dir).map_err(|e| e.to_string())?;
        let manifest_path = dir.join("manifest.tsv");
        let manifest = manifest_path
            .exists()
            .then(|| CorpusManifest::read(&manifest_path))
            .transpose()
            .map_err(|e| e.to_string())?;
        let analysis = analyze(&docs, &snapshot_config()).map_err(|e| e.to_string())?;
        Ok(Snapshot { docs, manifest, analysis })
    })())
}

fn population_counts(s: &Snapshot) -> Verdict {
    let mut checks = vec![];
    let fetched = s.manifest.as_ref().map_or(s.docs.len(), CorpusManifest::len);
    checks.push(if fetched == 1017 && s.docs.len() == 1017 {
        Ok("1017 fetched".to_string())
    } else {
        Err(format!("fetched {fetched}, cached {} (expected 1017)", s.docs.len()))
    });
    if let Some(m) = &s.manifest {
        let mismatched = s
            .docs
            .iter()
            .filter(|d| m.checksum_of(&d.reference.result_id) != Some(d.checksum.as_str()))
            .count();
        checks.push(if mismatched == 0 {
            Ok("checksums match manifest".into())
        } else {
            Err(format!("{mismatched} bodies differ from manifest"))
        });
    }
    let a = &s.analysis;
    let got: Vec<usize> = CONSISTENCY_STAGES.iter().map(|&st| a.consistency.count(st)).collect();
    let want = vec![40, 3, 4, 3, 1, 5, 1];
    checks.push(if got == want && a.consistency.retained_count == 960 {
        Ok(format!("consistency {got:?} -> 960"))
    } else {
        Err(format!("consistency {got:?} -> {} (expected {want:?} -> 960)", a.consistency.retained_count))
    });
    let got: Vec<usize> = COMPARABILITY_STAGES.iter().map(|&st| a.comparability.count(st)).collect();
    let want = vec![9, 6, 269];
    checks.push(if got == want && a.comparability.retained_count == 676 {
        Ok(format!("comparability {got:?} -> 676"))
    } else {
        Err(format!("comparability {got:?} -> {} (expected {want:?} -> 676)", a.comparability.retained_count))
    });
    all(checks)
}

fn idle_fraction_means(a: &Analysis<f64>) -> Verdict {
    let yearly = bin_by_year(&a.comparable, |r| vec![r.metrics.idle_fraction], StdKind::Population);
    let check = |year: i32, expected: f64| match yearly.get(&year) {
        Some(s) => within(&format!("{year}"), s.mean, expected, 0.002),
        None => Err(format!("{year}: no runs")),
    };
    all(vec![check(2006, 0.701), check(2017, 0.157), check(2024, 0.257)])
}

fn socket_power_eras(a: &Analysis<f64>) -> Verdict {
    let early = YearRange::up_to(2010);
    let late = YearRange::since(2022);
    let at = |p: u8| {
        let level = LoadLevel::from_percent(p).unwrap();
        let f = move |r: &AnalyzedRun<f64>| r.metrics.socket_power_at(level).unwrap();
        (era_mean(&a.comparable, early, f), era_mean(&a.comparable, late, f))
    };
    let mut checks = vec![];
    match at(100) {
        (Ok(e), Ok(l)) => {
            checks.push(within("<=2010 full load W", e, 119.0, 0.5));
            checks.push(within("2022+ full load W", l, 303.3, 0.5));
            checks.push(within("ratio 100%", l / e, 2.5, 0.1));
        }
        _ => checks.push(Err("empty era".into())),
    }
    for (p, ratio) in [(20u8, 1.8), (70, 2.2)] {
        match at(p) {
            (Ok(e), Ok(l)) => checks.push(within(&format!("ratio {p}%"), l / e, ratio, 0.1)),
            _ => checks.push(Err("empty era".into())),
        }
    }
    all(checks)
}

fn top_100(a: &Analysis<f64>) -> Verdict {
    match top_k_vendor_counts(&a.comparable, |r| r.metrics.overall_efficiency, 100) {
        Ok(counts) => {
            let want: BTreeMap<Vendor, usize> = [(Vendor::Intel, 2), (Vendor::Amd, 98)].into_iter().collect();
            if counts == want {
                Verdict::Pass(format!("{counts:?}"))
            } else {
                Verdict::Fail(format!("{counts:?} (expected {want:?})"))
            }
        }
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

fn shares_and_rates(a: &Analysis<f64>) -> Verdict {
    let dated: Vec<(i32, &BenchmarkRun)> = a
        .consistent
        .iter()
        .filter_map(|r| canonical_year(r).ok().map(|y| (y, r)))
        .collect();
    let share = |range: YearRange, feature: fn(&BenchmarkRun) -> String, cat: &str| -> f64 {
        let group: Vec<_> = dated.iter().copied().filter(|(y, _)| range.contains(*y)).collect();
        feature_share::<f64, _>(&group, |p| p.0, |p| feature(p.1), false)
            .get(&None)
            .and_then(|m| m.get(cat).copied())
            .unwrap_or(0.0)
    };
    let os = |r: &BenchmarkRun| r.os_family.to_string();
    let vendor = |r: &BenchmarkRun| r.vendor.to_string();
    let linux = OsFamily::Linux.to_string();
    let amd = Vendor::Amd.to_string();
    let windows_early = share(YearRange::up_to(2017), os, &OsFamily::Windows.to_string());
    let years: Vec<i32> = dated.iter().map(|p| p.0).collect();
    let rate = |f, t| submission_rate::<f64>(years.iter().copied(), YearRange::between(f, t)).unwrap();
    all(vec![
        within("Linux before 2018", share(YearRange::before(2018), os, &linux), 0.022, 0.002),
        within("Linux from 2018", share(YearRange::since(2018), os, &linux), 0.363, 0.002),
        within("AMD before 2018", share(YearRange::before(2018), vendor, &amd), 0.130, 0.002),
        within("AMD from 2018", share(YearRange::since(2018), vendor, &amd), 0.313, 0.002),
        if windows_early > 0.97 {
            Ok(format!("Windows through 2017 {windows_early:.4} > 0.97"))
        } else {
            Err(format!("Windows through 2017 {windows_early:.4} <= 0.97"))
        },
        within("runs/year 2005-2023", rate(2005, 2023), 44.2, 0.1),
        within("runs/year 2013-2017", rate(2013, 2017), 15.2, 0.1),
    ])
}

fn correlation_stats(a: &Analysis<f64>) -> Verdict {
    let recent: Vec<AnalyzedRun<f64>> = a.comparable.iter().filter(|r| r.year >= 2021).cloned().collect();
    let features = vec![
        Feature::new("cores_total", |r: &AnalyzedRun<f64>| Some(f64::from(r.run.cores_total))),
        Feature::new("nominal_ghz", |r: &AnalyzedRun<f64>| r.run.cpu_nominal_mhz.map(|m| m / 1000.0)),
    ];
    let scan = match correlation_scan(&recent, &features, StdKind::Population) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let stat = |v, f| scan.vendor_stats(v, f).ok_or(format!("no {v} {f}"));
    let mut checks = vec![];
    match (stat(Vendor::Amd, "cores_total"), stat(Vendor::Intel, "cores_total")) {
        (Ok(a), Ok(i)) => {
            checks.push(within("AMD cores mean", a.mean, 85.8, 0.5));
            checks.push(within("Intel cores mean", i.mean, 39.5, 0.5));
        }
        (a, i) => checks.push(Err(format!("{:?} {:?}", a.err(), i.err()))),
    }
    match (stat(Vendor::Amd, "nominal_ghz"), stat(Vendor::Intel, "nominal_ghz")) {
        (Ok(a), Ok(i)) => {
            checks.push(within("AMD GHz std", a.std, 0.3, 0.05));
            checks.push(within("Intel GHz std", i.std, 0.5, 0.05));
            checks.push(within("AMD GHz mean", a.mean, 2.3, 0.1));
            checks.push(within("Intel GHz mean", i.mean, 2.3, 0.1));
        }
        (a, i) => checks.push(Err(format!("{:?} {:?}", a.err(), i.err()))),
    }
    all(checks)
}

fn fixture_docs() -> Vec<RawResultDocument> {
    Cache::open(data_dir().join("reports")).unwrap().documents().unwrap()
}

fn printed_score_cross_check(runs: &[AnalyzedRun<f64>], population: &str) -> Verdict {
    if runs.is_empty() {
        return Verdict::Fail(format!("{population}: no runs"));
    }
    let ok = runs
        .iter()
        .filter(|r| (r.metrics.overall_efficiency - r.run.reported_overall_efficiency).abs() <= 0.5)
        .count();
    let share = ok as f64 / runs.len() as f64;
    let line = format!("{ok}/{} runs within 0.5 ops/W ({population})", runs.len());
    if share >= 0.99 {
        Verdict::Pass(line)
    } else {
        Verdict::Fail(line)
    }
}

fn prop<V: std::fmt::Debug>(name: &str, result: Result<(), proptest::test_runner::TestError<V>>) -> Check {
    result.map(|_| name.to_string()).map_err(|e| format!("{name}: {e}"))
}

fn arb_levels() -> impl Strategy<Value = ([u64; 10], [f64; 10], f64)> {
    (
        proptest::array::uniform10(1u64..40_000_000),
        proptest::array::uniform10(5.0f64..4000.0),
        1.0f64..2000.0,
    )
}

fn property_suite() -> Verdict {
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    let base = || synthetic_run("power_ssj2008-20200101-00001", 2020, Vendor::Intel);
    let mut checks = vec![];

    let r = runner.run(&arb_levels(), |(ops, power, idle)| {
        let run = with_levels(base(), ops, power, idle);
        prop_assert_eq!(relative_efficiency::<f64>(&run, LoadLevel::FULL).unwrap(), 1.0);
        Ok(())
    });
    checks.push(prop("relative efficiency at 100% is 1", r));

    let r = runner.run(&(arb_levels(), 0.01f64..100.0), |((ops, power, idle), k)| {
        let a = with_levels(base(), ops, power, idle);
        let scaled: Vec<f64> = power.iter().map(|p| p * k).collect();
        let b = with_levels(base(), ops, scaled.try_into().unwrap(), idle * k);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        for level in LoadLevel::TARGETS {
            prop_assert!(close(relative_efficiency::<f64>(&a, level).unwrap(), relative_efficiency::<f64>(&b, level).unwrap()));
            prop_assert!(close(efficiency_at::<f64>(&a, level).unwrap() / k, efficiency_at::<f64>(&b, level).unwrap()));
        }
        prop_assert!(close(idle_fraction::<f64>(&a).unwrap(), idle_fraction::<f64>(&b).unwrap()));
        prop_assert!(close(eiq::<f64>(&a).unwrap(), eiq::<f64>(&b).unwrap()));
        Ok(())
    });
    checks.push(prop("power scaling leaves ratios unchanged", r));

    let r = runner.run(&arb_levels(), |(ops, power, idle)| {
        let run = with_levels(base(), ops, power, idle);
        let weighted: f64 = LoadLevel::TARGETS
            .iter()
            .map(|&l| run.power_at(l).unwrap() * efficiency_at::<f64>(&run, l).unwrap())
            .sum();
        let weights: f64 = power.iter().sum::<f64>() + idle;
        let overall = overall_efficiency::<f64>(&run).unwrap();
        prop_assert!((overall - weighted / weights).abs() <= 1e-9 * overall.max(1.0));
        Ok(())
    });
    checks.push(prop("overall efficiency is the power-weighted mean", r));

    let r = runner.run(&arb_levels(), |(ops, power, idle)| {
        let run = with_levels(base(), ops, power, idle);
        let expected = 2.0 * power[9] - power[8];
        let got = extrapolated_idle::<f64>(&run).unwrap();
        prop_assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        let flagged = !compute_metrics::<f64>(&run).unwrap().flags.is_empty();
        prop_assert_eq!(flagged, got <= 0.0);
        Ok(())
    });
    checks.push(prop("extrapolated idle is 2*P10 - P20", r));

    let r = runner.run(&(proptest::array::uniform10(1u64..40_000_000), 1.0f64..2000.0), |(ops, p)| {
        let run = with_levels(base(), ops, [p; 10], p);
        prop_assert!((eiq::<f64>(&run).unwrap() - 1.0).abs() <= 1e-9);
        Ok(())
    });
    checks.push(prop("flat power gives EIQ 1", r));

    let r = runner.run(&proptest::collection::vec((any::<bool>(), any::<bool>(), 0u32..4), 0..80), |defects| {
        let runs: Vec<BenchmarkRun> = defects
            .iter()
            .enumerate()
            .map(|(i, &(acc, multi, extra))| {
                let mut r = synthetic_run(&format!("r{i:04}"), 2010, Vendor::Amd);
                r.accepted = acc;
                r.nodes = Some(if multi { 2 } else { 1 });
                r.threads_total = r.threads_total.map(|t| t + extra);
                r
            })
            .collect();
        let out = apply_stages(runs, &Stage::ALL, &snapshot_config().resolved_filters());
        prop_assert_eq!(out.report.input_count, defects.len());
        prop_assert_eq!(out.report.input_count, out.report.retained_count + out.report.excluded_count());
        prop_assert_eq!(out.exclusions.len(), out.report.excluded_count());
        Ok(())
    });
    checks.push(prop("filter partition arithmetic", r));

    let r = runner.run(&arb_levels(), |(ops, power, idle)| {
        let run = with_levels(base(), ops, power, idle);
        let analyzed = AnalyzedRun::<f64>::new(run).unwrap();
        let text = to_jsonl([&analyzed]);
        let back: Vec<AnalyzedRun<f64>> = read_jsonl(text.as_bytes()).unwrap();
        prop_assert_eq!(&back[0], &analyzed);
        Ok(())
    });
    checks.push(prop("record serialization round-trips", r));

    checks.push(deterministic_emission());
    all(checks)
}

fn deterministic_emission() -> Check {
    let mut cfg = snapshot_config();
    cfg.formats.insert(Emission::Svg);
    let docs = fixture_docs();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (i, d) in dirs.iter().enumerate() {
        cfg.jobs = Some(1 + 3 * i);
        let a = analyze::<f64>(&docs, &cfg).map_err(|e| e.to_string())?;
        write_bundle(d.path(), &emit::bundle(&a, &cfg, &[])).map_err(|e| e.to_string())?;
    }
    let listing = |p: &Path| {
        let mut names: Vec<String> = fs::read_dir(p).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        names.sort();
        names
    };
    let names = listing(dirs[0].path());
    if names != listing(dirs[1].path()) {
        return Err("re-emission produced different file sets".into());
    }
    for n in &names {
        if fs::read(dirs[0].path().join(n)).unwrap() != fs::read(dirs[1].path().join(n)).unwrap() {
            return Err(format!("re-emission differs in {n}"));
        }
    }
    Ok(format!("re-emission byte-identical ({} files)", names.len()))
}

fn golden_files() -> Verdict {
    let dir = data_dir();
    let mut ids: Vec<String> = fs::read_dir(dir.join("reports"))
        .unwrap()
        .filter_map(|e| e.unwrap().file_name().into_string().unwrap().strip_suffix(".txt").map(String::from))
        .collect();
    ids.sort();
    let years: Vec<i32> = ids.iter().map(|id| id[14..18].parse().unwrap()).collect();
    let mut checks = vec![if ids.len() >= 10 && years.iter().min() <= Some(&2007) && years.iter().max() >= Some(&2024) {
        Ok(format!("{} files spanning {}-{}", ids.len(), years[0], years[years.len() - 1]))
    } else {
        Err(format!("{} files spanning {:?}", ids.len(), years))
    }];
    for id in &ids {
        let body = decode_report(&fs::read(dir.join("reports").join(format!("{id}.txt"))).unwrap());
        let expected = fs::read_to_string(dir.join("expected").join(format!("{id}.json"))).unwrap();
        match parse_body(id, &body, None, ParseOptions::default()) {
            Ok(run) if serde_json::to_string(&run).unwrap() + "\n" == expected => {}
            Ok(_) => checks.push(Err(format!("{id}: record differs"))),
            Err(f) => checks.push(Err(f.to_string())),
        }
    }
    all(checks)
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let snapshot = load_snapshot();
    type Criterion = (&'static str, fn(&Snapshot) -> Verdict);
    let snapshot_criteria: [Criterion; 6] = [
        ("population counts 1017 -> 960 -> 676", population_counts),
        ("idle-fraction yearly means", |s| idle_fraction_means(&s.analysis)),
        ("per-socket power era means and ratios", |s| socket_power_eras(&s.analysis)),
        ("top-100 overall efficiency vendors", |s| top_100(&s.analysis)),
        ("feature shares and submission rates", |s| shares_and_rates(&s.analysis)),
        ("core count and frequency statistics since 2021", |s| correlation_stats(&s.analysis)),
    ];
    for (name, f) in snapshot_criteria {
        let v = match &snapshot {
            None => Verdict::Skip(format!("no corpus snapshot; set {SNAPSHOT_ENV} to a synced cache directory")),
            Some(Err(e)) => Verdict::Fail(format!("cannot load snapshot: {e}")),
            Some(Ok(s)) => f(s),
        };
        results.push((name, v));
    }

    let oracle = match &snapshot {
        Some(Ok(s)) => printed_score_cross_check(&s.analysis.comparable, "snapshot comparable population"),
        _ => match analyze::<f64>(&fixture_docs(), &snapshot_config()) {
            Ok(a) => printed_score_cross_check(&a.comparable, "committed sample reports only"),
            Err(e) => Verdict::Fail(e.to_string()),
        },
    };
    results.push(("recomputed overall efficiency matches printed score", oracle));
    results.push(("property suite", property_suite()));
    results.push(("parser golden files", golden_files()));

    let mut failed = 0;
    for (name, v) in &results {
        match v {
            Verdict::Pass(d) => println!("PASS  {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
            Verdict::Skip(d) => println!("SKIP  {name}: {d}"),
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
