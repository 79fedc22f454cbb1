//! End-to-end orchestration: cached corpus → parse → filter → metrics, plus
//! bundle writing and per-run dossiers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, FilterConfig, PipelineConfig};
use crate::emit::Artifact;
use crate::fetcher::{Cache, FetchError, RawResultDocument};
use crate::filters::{
    apply_stages, canonical_year, ExclusionRecord, FilterReport, COMPARABILITY_STAGES,
    CONSISTENCY_STAGES,
};
use crate::metrics::compute_metrics;
use crate::model::{BenchmarkRun, LoadLevel};
use crate::parser::{parse_batch, ParseFailure, ParseOptions};
use crate::scalar::Scalar;
use crate::trends::{AnalyzedRun, TrendError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("fetch stage: {0}")]
    Fetch(#[from] FetchError),
    #[error("parse stage: no result documents in {0}")]
    EmptyCorpus(PathBuf),
    #[error("parse stage: cannot build worker pool: {0}")]
    Workers(String),
    #[error("metrics stage: {0}")]
    Metrics(#[from] TrendError),
    #[error("emit stage: {path}: {source}")]
    Emit {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: not found")]
    NotFound(String),
}

/// Every `.txt` document in the cache directory, sorted by result id.
pub fn load_documents(cache_dir: &Path) -> Result<Vec<RawResultDocument>, PipelineError> {
    if !cache_dir.is_dir() {
        return Err(PipelineError::EmptyCorpus(cache_dir.to_path_buf()));
    }
    let docs = Cache::open(cache_dir)?.documents()?;
    if docs.is_empty() {
        return Err(PipelineError::EmptyCorpus(cache_dir.to_path_buf()));
    }
    Ok(docs)
}

/// Runs `f` on a rayon pool of `jobs` threads (all cores when `None`).
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| PipelineError::Workers(e.to_string()))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone)]
pub struct Analysis<T> {
    pub documents: usize,
    pub parsed: usize,
    pub failures: Vec<ParseFailure>,
    pub consistency: FilterReport,
    pub comparability: FilterReport,
    /// Both phases, consistency first, each in input order.
    pub exclusions: Vec<ExclusionRecord>,
    /// Runs past the consistency stages.
    pub consistent: Vec<BenchmarkRun>,
    /// Runs past both phases, with metrics.
    pub comparable: Vec<AnalyzedRun<T>>,
}

pub fn analyze<T: Scalar>(docs: &[RawResultDocument], cfg: &PipelineConfig) -> Result<Analysis<T>, PipelineError> {
    let filters = cfg.resolved_filters();
    with_jobs(cfg.jobs, || analyze_in_pool(docs, &filters))?
}

fn analyze_in_pool<T: Scalar>(docs: &[RawResultDocument], filters: &FilterConfig) -> Result<Analysis<T>, PipelineError> {
    let (runs, failures) = parse_batch(docs, ParseOptions::default());
    let parsed = runs.len();
    let first = apply_stages(runs, &CONSISTENCY_STAGES, filters);
    let consistent = first.retained.clone();
    let second = apply_stages(first.retained, &COMPARABILITY_STAGES, filters);
    let mut exclusions = first.exclusions;
    exclusions.extend(second.exclusions);

    use rayon::prelude::*;
    let comparable = second
        .retained
        .into_par_iter()
        .map(AnalyzedRun::new)
        .collect::<Result<Vec<_>, TrendError>>()?;
    Ok(Analysis {
        documents: docs.len(),
        parsed,
        failures,
        consistency: first.report,
        comparability: second.report,
        exclusions,
        consistent,
        comparable,
    })
}

/// Writes `artifacts` into `out_dir`. Everything is staged in a hidden
/// directory first; on any error the staged files are dropped and nothing
/// new appears in `out_dir`.
pub fn write_bundle(out_dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, PipelineError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Emit { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let staging = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(out_dir)
        .map_err(io(out_dir))?;
    for a in artifacts {
        let p = staging.path().join(&a.file_name);
        fs::write(&p, &a.contents).map_err(io(&p))?;
    }
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let dest = out_dir.join(&a.file_name);
        fs::rename(staging.path().join(&a.file_name), &dest).map_err(io(&dest))?;
        written.push(dest);
    }
    Ok(written)
}

/// Fails early when `dir` cannot be created or written.
pub fn ensure_writable(dir: &Path) -> Result<(), PipelineError> {
    let err = |source| PipelineError::Emit {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(err)?;
    tempfile::Builder::new()
        .prefix(".probe-")
        .tempfile_in(dir)
        .map(drop)
        .map_err(err)
}

/// Human-readable account of one run: parsed fields, filter verdict and
/// metrics.
pub fn explain(docs: &[RawResultDocument], cfg: &PipelineConfig, result_id: &str) -> Result<String, PipelineError> {
    let doc = docs
        .iter()
        .find(|d| d.reference.result_id == result_id)
        .ok_or_else(|| PipelineError::NotFound(result_id.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "result      {result_id}");
    let _ = writeln!(out, "source      {}", doc.reference.url);
    let _ = writeln!(out, "checksum    {}", doc.checksum);
    let run = match crate::parser::parse_run(doc) {
        Ok(run) => run,
        Err(f) => {
            let _ = writeln!(out, "parse       FAILED {} in {}: {:?}", f.reason, f.field, f.excerpt);
            return Ok(out);
        }
    };

    let _ = writeln!(out, "\n[parsed]");
    let _ = writeln!(out, "accepted            {}", run.accepted);
    let _ = writeln!(out, "publication marker  {}", run.publication_marker.as_deref().unwrap_or("-"));
    for (name, date) in run.dates() {
        let _ = writeln!(out, "{name:<20}{date}");
    }
    let _ = writeln!(out, "cpu                 {} ({}, {})", run.cpu_name, run.vendor, run.marketing_class);
    if run.cpu_names.len() > 1 {
        let _ = writeln!(out, "cpu names           {}", run.cpu_names.join(" | "));
    }
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let _ = writeln!(out, "nominal MHz         {}", opt(run.cpu_nominal_mhz.map(|v| v.to_string())));
    let _ = writeln!(out, "nodes               {}", opt(run.nodes.map(|v| v.to_string())));
    let _ = writeln!(
        out,
        "sockets/cores/thr   {} / {} / {}  ({} cores per chip)",
        run.sockets,
        run.cores_total,
        opt(run.threads_total.map(|v| v.to_string())),
        run.cores_per_chip
    );
    let _ = writeln!(out, "memory GB           {}", opt(run.memory_gb.map(|v| v.to_string())));
    let _ = writeln!(out, "os                  {} ({})", run.os_name, run.os_family);
    let _ = writeln!(out, "jvm                 {}", run.jvm_name);
    let _ = writeln!(out, "printed score       {}", run.reported_overall_efficiency);
    let _ = writeln!(out, "load      ssj_ops      power W");
    for m in &run.levels {
        let _ = writeln!(out, "{:<8}{:>11}{:>13.1}", m.target_load.to_string(), m.ssj_ops, m.avg_power_w);
    }
    let _ = writeln!(out, "{:<8}{:>11}{:>13.1}", "idle", 0, run.idle_power_w);

    let filters = cfg.resolved_filters();
    let verdict = CONSISTENCY_STAGES
        .iter()
        .chain(COMPARABILITY_STAGES.iter())
        .find_map(|&s| s.check(&run, &filters).map(|d| (s, d)));
    let _ = writeln!(out, "\n[filters]");
    match &verdict {
        Some((stage, detail)) => {
            let phase = if CONSISTENCY_STAGES.contains(stage) { "consistency" } else { "comparability" };
            let _ = writeln!(out, "excluded at {stage} ({phase}): {detail}");
        }
        None => {
            let _ = writeln!(out, "retained");
        }
    }
    if let Ok(year) = canonical_year(&run) {
        let _ = writeln!(out, "canonical year      {year}");
    }

    let _ = writeln!(out, "\n[metrics]");
    match compute_metrics::<f64>(&run) {
        Ok(m) => {
            use crate::emit::format::{one_decimal, ratio};
            let _ = writeln!(out, "overall efficiency  {} ops/W", one_decimal(m.overall_efficiency));
            let _ = writeln!(out, "idle fraction       {}", ratio(m.idle_fraction));
            let _ = writeln!(out, "extrapolated idle   {} W", one_decimal(m.extrapolated_idle_w));
            let _ = writeln!(out, "eiq                 {}", ratio(m.eiq));
            for f in &m.flags {
                let _ = writeln!(out, "flag                {f:?}");
            }
            let _ = writeln!(out, "load      ops/W        relative   W/socket");
            for level in LoadLevel::TARGETS {
                let _ = writeln!(
                    out,
                    "{:<8}{:>11}{:>13}{:>11}",
                    level.to_string(),
                    one_decimal(m.efficiency_per_level[&level]),
                    ratio(m.relative_efficiency[&level]),
                    one_decimal(m.per_socket_power[&level])
                );
            }
            let _ = writeln!(
                out,
                "{:<8}{:>11}{:>13}{:>11}",
                "idle",
                "-",
                "-",
                one_decimal(m.per_socket_power[&LoadLevel::ACTIVE_IDLE])
            );
        }
        Err(e) => {
            let _ = writeln!(out, "unavailable: {e}");
        }
    }
    Ok(out)
}
