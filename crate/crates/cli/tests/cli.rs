use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn reports() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/reports")
}

fn specpower(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_specpower"));
    cmd.env_remove("SPECPOWER_CACHE_DIR").env_remove("RUST_LOG").args(args);
    cmd
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let cache = reports();
    let mut all = vec!["--cache-dir", cache.to_str().unwrap(), "--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    specpower(&all).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn only_emits_the_selected_figure() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["analyze", "--only", "fig5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(files(out.path()), ["fig5_idle_fraction.csv"]);
    let text = fs::read_to_string(out.path().join("fig5_idle_fraction.csv")).unwrap();
    assert!(text.starts_with("# population: comparable runs, n=12\n"), "{text}");
}

#[test]
fn unknown_selection_is_a_usage_error() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["analyze", "--only", "fig9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fig9"));
    assert!(files(out.path()).is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(specpower(&["analyze", "--bogus"]).output().unwrap().status.code(), Some(1));
    assert_eq!(specpower(&["--jobs", "0", "report"]).output().unwrap().status.code(), Some(1));
    assert_eq!(specpower(&["--cutoff", "2024/06/30", "report"]).output().unwrap().status.code(), Some(1));
    assert_eq!(specpower(&["--help"]).output().unwrap().status.code(), Some(0));
}

#[test]
fn future_cutoff_is_rejected() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["--cutoff", "2999-01-01", "report"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("future"));
}

#[test]
fn unusable_output_path_fails_before_work() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("taken");
    fs::write(&file, "x").unwrap();
    let o = run_in(&file, &["analyze"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("emit stage"), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&file).unwrap(), "x");
}

#[test]
fn explain_names_the_exclusion_stage() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["explain", "power_ssj2008-20110920-00395"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("excluded at MultiNodeOrManySocket (comparability): nodes=4"), "{text}");
}

#[test]
fn explain_shows_metrics_for_a_retained_run() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["explain", "power_ssj2008-20230221-01234"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\nretained\n"), "{text}");
    assert!(text.contains("overall efficiency  15112.0 ops/W"), "{text}");
    let full = text.lines().find(|l| l.starts_with("100%") && l.contains("1.000")).is_some();
    assert!(full, "{text}");
}

#[test]
fn explain_unknown_id_is_a_pipeline_failure() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["explain", "power_ssj2008-19990101-00000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not found"));
}

#[test]
fn cache_location_comes_from_the_environment() {
    let out = tempfile::tempdir().unwrap();
    let o = specpower(&["--out", out.path().to_str().unwrap(), "filter"])
        .env("SPECPOWER_CACHE_DIR", reports())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(files(out.path()), ["exclusions.csv", "filter_report.csv"]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("consistency,retained,13"), "{stdout}");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_in(a.path(), &["--jobs", "1", "analyze"]).status.success());
    assert!(run_in(b.path(), &["--jobs", "4", "analyze"]).status.success());
    let names = files(a.path());
    assert_eq!(names, files(b.path()));
    assert!(names.len() >= 15, "{names:?}");
    for n in &names {
        assert_eq!(fs::read(a.path().join(n)).unwrap(), fs::read(b.path().join(n)).unwrap(), "{n}");
    }
}

#[test]
fn every_table_names_its_population() {
    let out = tempfile::tempdir().unwrap();
    assert!(run_in(out.path(), &["analyze"]).status.success());
    for n in files(out.path()).iter().filter(|n| n.ends_with(".csv")) {
        let text = fs::read_to_string(out.path().join(n)).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("# population: ") && first.contains(", n="), "{n}: {first}");
    }
}

#[test]
fn parse_writes_records_and_failures() {
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["parse"]);
    assert!(o.status.success());
    assert_eq!(files(out.path()), ["parse_failures.jsonl", "parsed_runs.jsonl"]);
    let runs = fs::read_to_string(out.path().join("parsed_runs.jsonl")).unwrap();
    assert_eq!(runs.lines().count(), 15);
}

#[test]
fn offline_fetch_without_a_cache_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let o = specpower(&["--offline", "--cache-dir", cache.to_str().unwrap(), "fetch"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fetch stage"), "{}", stderr(&o));
}

#[test]
fn missing_cache_is_a_pipeline_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let o = specpower(&[
        "--cache-dir",
        tmp.path().join("none").to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
        "report",
    ])
    .output()
    .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shipped_config_loads() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml");
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["--config", cfg.to_str().unwrap(), "report"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn shipped_config_matches_the_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml");
    let cfg = specpower_core::PipelineConfig::load(&path).unwrap();
    assert_eq!(cfg, specpower_core::PipelineConfig::default());
}
