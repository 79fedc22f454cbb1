use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use log::info;

use specpower_core::config::{ConfigError, PipelineConfig};
use specpower_core::emit;
use specpower_core::fetcher::{sync_corpus, Cache, CorpusManifest, HttpTransport, OfflineTransport, SyncOptions, Transport};
use specpower_core::parser::{parse_batch, ParseOptions};
use specpower_core::pipeline::{self, ensure_writable, load_documents, write_bundle, PipelineError};
use specpower_core::records::to_jsonl;

const CACHE_ENV: &str = "SPECPOWER_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "specpower", version, about = "Fetch, parse, filter and analyze SPECpower_ssj2008 results")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Inclusive publication cutoff.
    #[arg(long, global = true, value_name = "YYYY-MM-DD", value_parser = parse_date)]
    cutoff: Option<NaiveDate>,
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parsing, metrics and downloads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    /// Never touch the network; use the cache only.
    #[arg(long, global = true)]
    offline: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Download the result index and every result up to the cutoff into the cache.
    Fetch {
        /// Manifest to verify downloaded bodies against.
        #[arg(long)]
        pin: Option<PathBuf>,
    },
    /// Parse the cached corpus into run records and a failures file.
    Parse,
    /// Parse and filter; writes the filter report and exclusion ledger.
    Filter,
    /// Full pipeline; writes every table, record file and plot.
    Analyze {
        /// Emit only these artifacts (fig1..fig6 or a table name); repeatable or comma-separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Print everything known about one run.
    Explain { result_id: String },
    /// Print the headline numbers to stdout.
    Report,
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("expected YYYY-MM-DD: {e}"))
}

/// Error paired with the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

fn pipeline_failure(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) => usage(e),
            other => pipeline_failure(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path).map_err(usage)?,
        None => PipelineConfig::default(),
    };
    if let Some(c) = cli.cutoff {
        cfg.cutoff = c;
    }
    if let Some(d) = &cli.cache_dir {
        cfg.cache_dir = d.clone();
    }
    if let Some(d) = &cli.out {
        cfg.output_dir = d.clone();
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = Some(usize::from(j));
        cfg.fetch.workers = usize::from(j);
    }
    let today = chrono::Utc::now().date_naive();
    cfg.validate(today).map_err(|e: ConfigError| usage(e))?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Fetch { pin } => fetch(&cfg, pin.as_deref(), cli.offline),
        Command::Parse => parse(&cfg),
        Command::Filter => filter(&cfg),
        Command::Analyze { only } => analyze(&cfg, only),
        Command::Explain { result_id } => {
            let docs = load_documents(&cfg.cache_dir)?;
            print!("{}", pipeline::explain(&docs, &cfg, result_id)?);
            Ok(())
        }
        Command::Report => {
            let docs = load_documents(&cfg.cache_dir)?;
            let a = pipeline::analyze::<f64>(&docs, &cfg)?;
            print!("{}", emit::headline(&a, &cfg));
            Ok(())
        }
    }
}

fn fetch(cfg: &PipelineConfig, pin: Option<&Path>, offline: bool) -> Result<(), Failure> {
    let pinned = pin
        .map(CorpusManifest::read)
        .transpose()
        .map_err(pipeline_failure)?;
    let opts = SyncOptions {
        workers: cfg.fetch.workers,
        delay: Duration::from_millis(cfg.fetch.delay_ms),
        retries: cfg.fetch.retries,
        pinned,
    };
    let transport: Box<dyn Transport> = if offline {
        Box::new(OfflineTransport)
    } else {
        Box::new(HttpTransport::new(Duration::from_secs(cfg.fetch.timeout_secs)))
    };
    let cache = Cache::open(&cfg.cache_dir)
        .with_context(|| format!("cache directory {}", cfg.cache_dir.display()))
        .map_err(pipeline_failure)?;
    let manifest = sync_corpus(transport.as_ref(), &cfg.index_url, cfg.cutoff, &cache, &opts)
        .map_err(|e| pipeline_failure(PipelineError::Fetch(e)))?;
    println!(
        "{} results up to {} (snapshot {}), manifest {}",
        manifest.len(),
        cfg.cutoff,
        manifest.snapshot_date,
        cfg.cache_dir.join("manifest.tsv").display()
    );
    Ok(())
}

fn parse(cfg: &PipelineConfig) -> Result<(), Failure> {
    ensure_writable(&cfg.output_dir)?;
    let docs = load_documents(&cfg.cache_dir)?;
    let (runs, failures) = pipeline::with_jobs(cfg.jobs, || parse_batch(&docs, ParseOptions::default()))?;
    let artifacts = [
        emit::Artifact {
            key: "records",
            file_name: "parsed_runs.jsonl".into(),
            contents: to_jsonl(&runs),
        },
        emit::Artifact {
            key: "records",
            file_name: "parse_failures.jsonl".into(),
            contents: to_jsonl(&failures),
        },
    ];
    write_bundle(&cfg.output_dir, &artifacts)?;
    println!("{} documents: {} parsed, {} failed", docs.len(), runs.len(), failures.len());
    for f in &failures {
        info!("{f}");
    }
    Ok(())
}

fn filter(cfg: &PipelineConfig) -> Result<(), Failure> {
    ensure_writable(&cfg.output_dir)?;
    let docs = load_documents(&cfg.cache_dir)?;
    let a = pipeline::analyze::<f64>(&docs, cfg)?;
    let report = emit::filter_report(&a);
    let artifacts = emit::bundle(&a, cfg, &["filter_report".into(), "exclusions".into()]);
    write_bundle(&cfg.output_dir, &artifacts)?;
    print!("{}", report.to_csv());
    Ok(())
}

fn analyze(cfg: &PipelineConfig, only: &[String]) -> Result<(), Failure> {
    if let Some(bad) = only.iter().find(|o| !emit::is_known_selector(o)) {
        return Err(usage(anyhow!(
            "unknown --only selector {bad:?}; expected one of {}",
            emit::KEYS.join(", ")
        )));
    }
    ensure_writable(&cfg.output_dir)?;
    let docs = load_documents(&cfg.cache_dir)?;
    let a = pipeline::analyze::<f64>(&docs, cfg)?;
    let artifacts = emit::bundle(&a, cfg, only);
    if artifacts.is_empty() {
        return Err(usage(anyhow!("the selection produced no output with formats {:?}", cfg.formats)));
    }
    for path in write_bundle(&cfg.output_dir, &artifacts)? {
        println!("{}", path.display());
    }
    Ok(())
}
