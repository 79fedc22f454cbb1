//! Staged consistency and comparability filters with an exclusion ledger.
//!
//! Every run is charged to the first stage it fails; stage order is the
//! order of [`CONSISTENCY_STAGES`] and [`COMPARABILITY_STAGES`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::FilterConfig;
use crate::model::{BenchmarkRun, DateField, MarketingClass, Vendor};
use crate::parser::has_both_vendor_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    NotAccepted,
    AmbiguousDate,
    ImplausibleDate,
    AmbiguousCpuName,
    MissingNodeCount,
    InconsistentCoreThread,
    ImplausibleCoreThread,
    NonIntelAmd,
    NonServerClass,
    MultiNodeOrManySocket,
}

pub const CONSISTENCY_STAGES: [Stage; 7] = [
    Stage::NotAccepted,
    Stage::AmbiguousDate,
    Stage::ImplausibleDate,
    Stage::AmbiguousCpuName,
    Stage::MissingNodeCount,
    Stage::InconsistentCoreThread,
    Stage::ImplausibleCoreThread,
];

pub const COMPARABILITY_STAGES: [Stage; 3] = [
    Stage::NonIntelAmd,
    Stage::NonServerClass,
    Stage::MultiNodeOrManySocket,
];

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::NotAccepted,
        Stage::AmbiguousDate,
        Stage::ImplausibleDate,
        Stage::AmbiguousCpuName,
        Stage::MissingNodeCount,
        Stage::InconsistentCoreThread,
        Stage::ImplausibleCoreThread,
        Stage::NonIntelAmd,
        Stage::NonServerClass,
        Stage::MultiNodeOrManySocket,
    ];

    /// `Some(detail)` when `run` fails this stage. The detail quotes the
    /// offending field value.
    pub fn check(self, run: &BenchmarkRun, cfg: &FilterConfig) -> Option<String> {
        match self {
            Stage::NotAccepted => (!run.accepted).then(|| {
                format!(
                    "publication_marker={:?}",
                    run.publication_marker.as_deref().unwrap_or("")
                )
            }),
            Stage::AmbiguousDate => run.dates().into_iter().find_map(|(name, d)| match d {
                DateField::Ambiguous(raw) => Some(format!("{name}={raw:?}")),
                _ => None,
            }),
            Stage::ImplausibleDate => implausible_date(run, cfg),
            Stage::AmbiguousCpuName => {
                if run.cpu_names.len() > 1 {
                    Some(format!("cpu_names={:?}", run.cpu_names))
                } else if has_both_vendor_tokens(&run.cpu_name) {
                    Some(format!("cpu_name={:?}", run.cpu_name))
                } else {
                    None
                }
            }
            Stage::MissingNodeCount => run.nodes.is_none().then(|| "nodes=missing".to_string()),
            Stage::InconsistentCoreThread => inconsistent_core_thread(run),
            Stage::ImplausibleCoreThread => {
                let threads = run.threads_total.unwrap_or(0);
                let per_core = threads.checked_div(run.cores_total).unwrap_or(0);
                if !cfg.threads_per_core.contains(&per_core) {
                    Some(format!(
                        "threads_total={threads} cores_total={} ({per_core} per core)",
                        run.cores_total
                    ))
                } else if run.cores_per_chip > cfg.max_cores_per_chip {
                    Some(format!("cores_per_chip={}", run.cores_per_chip))
                } else {
                    None
                }
            }
            Stage::NonIntelAmd => (run.vendor == Vendor::Other)
                .then(|| format!("vendor=Other cpu_name={:?}", run.cpu_name)),
            Stage::NonServerClass => (run.marketing_class == MarketingClass::Other)
                .then(|| format!("marketing_class=Other cpu_name={:?}", run.cpu_name)),
            Stage::MultiNodeOrManySocket => {
                let nodes = run.nodes.unwrap_or(0);
                (nodes == 0 || nodes > cfg.max_nodes || run.sockets > cfg.max_sockets)
                    .then(|| format!("nodes={nodes} sockets={}", run.sockets))
            }
        }
    }
}

fn implausible_date(run: &BenchmarkRun, cfg: &FilterConfig) -> Option<String> {
    for (name, field) in run.dates() {
        match field {
            DateField::Known(m) => {
                if *m < cfg.earliest_date || cfg.latest_date.is_some_and(|l| *m > l) {
                    return Some(format!("{name}={m}"));
                }
            }
            DateField::Malformed(raw) => return Some(format!("{name}={raw:?}")),
            // publication is optional; the other three must be present
            DateField::Missing if name != "submission_date" => {
                return Some(format!("{name}=missing"))
            }
            DateField::Missing | DateField::Ambiguous(_) => {}
        }
    }
    if let (Some(test), Some(hw)) = (run.test_date.known(), run.hw_availability.known()) {
        if test.months_until(hw) > cfg.max_hw_after_test_months {
            return Some(format!("hw_availability={hw} test_date={test}"));
        }
    }
    None
}

fn inconsistent_core_thread(run: &BenchmarkRun) -> Option<String> {
    let Some(threads) = run.threads_total else {
        return Some("threads_total=missing".to_string());
    };
    if threads % run.cores_total != 0 {
        return Some(format!(
            "threads_total={threads} not a multiple of cores_total={}",
            run.cores_total
        ));
    }
    if u64::from(run.cores_total) != u64::from(run.sockets) * u64::from(run.cores_per_chip) {
        return Some(format!(
            "cores_total={} != sockets={} x cores_per_chip={}",
            run.cores_total, run.sockets, run.cores_per_chip
        ));
    }
    None
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.to_string() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionRecord {
    pub result_id: String,
    pub stage: Stage,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    /// Every applied stage appears, including those that removed nothing.
    pub per_stage_counts: BTreeMap<Stage, usize>,
    pub retained_count: usize,
    pub input_count: usize,
}

impl FilterReport {
    pub fn excluded_count(&self) -> usize {
        self.per_stage_counts.values().sum()
    }

    pub fn count(&self, stage: Stage) -> usize {
        self.per_stage_counts.get(&stage).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub retained: Vec<BenchmarkRun>,
    pub report: FilterReport,
    pub exclusions: Vec<ExclusionRecord>,
}

/// Applies `stages` in the given order; input order is preserved in both
/// the retained list and the ledger.
pub fn apply_stages(runs: Vec<BenchmarkRun>, stages: &[Stage], cfg: &FilterConfig) -> FilterOutcome {
    let mut out = FilterOutcome {
        report: FilterReport {
            per_stage_counts: stages.iter().map(|&s| (s, 0)).collect(),
            input_count: runs.len(),
            retained_count: 0,
        },
        ..Default::default()
    };
    for run in runs {
        let failure = stages
            .iter()
            .find_map(|&stage| stage.check(&run, cfg).map(|detail| (stage, detail)));
        match failure {
            Some((stage, detail)) => {
                *out.report.per_stage_counts.entry(stage).or_default() += 1;
                out.exclusions.push(ExclusionRecord {
                    result_id: run.result_id,
                    stage,
                    detail,
                });
            }
            None => out.retained.push(run),
        }
    }
    out.report.retained_count = out.retained.len();
    out
}

pub fn consistency_filter(runs: Vec<BenchmarkRun>, cfg: &FilterConfig) -> FilterOutcome {
    apply_stages(runs, &CONSISTENCY_STAGES, cfg)
}

pub fn comparability_filter(runs: Vec<BenchmarkRun>, cfg: &FilterConfig) -> FilterOutcome {
    apply_stages(runs, &COMPARABILITY_STAGES, cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{result_id}: hardware availability is not a known month")]
pub struct MissingCanonicalDate {
    pub result_id: String,
}

/// Year of hardware availability, the timeline key for every trend.
pub fn canonical_year(run: &BenchmarkRun) -> Result<i32, MissingCanonicalDate> {
    run.hw_availability
        .known()
        .map(|m| m.year)
        .ok_or_else(|| MissingCanonicalDate {
            result_id: run.result_id.clone(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MonthYear;
    use crate::testing::synthetic_run;

    fn cfg() -> FilterConfig {
        FilterConfig {
            latest_date: MonthYear::new(2024, 6),
            ..FilterConfig::default()
        }
    }

    #[test]
    fn empty_input() {
        let out = consistency_filter(Vec::new(), &cfg());
        assert_eq!(out.report.retained_count, 0);
        assert_eq!(out.report.input_count, 0);
        assert_eq!(out.report.per_stage_counts.len(), 7);
        assert!(out.report.per_stage_counts.values().all(|&c| c == 0));
    }

    #[test]
    fn threads_not_multiple_of_cores() {
        let mut run = synthetic_run("r", 2020, Vendor::Intel);
        run.cores_total = 2;
        run.sockets = 1;
        run.cores_per_chip = 2;
        run.threads_total = Some(3);
        let out = consistency_filter(vec![run], &cfg());
        assert_eq!(out.exclusions[0].stage, Stage::InconsistentCoreThread);
        assert!(out.exclusions[0].detail.contains("threads_total=3"));
    }

    #[test]
    fn first_failing_stage_wins() {
        let mut run = synthetic_run("r", 2020, Vendor::Intel);
        run.accepted = false;
        run.publication_marker = Some("NC".into());
        run.nodes = None;
        let out = consistency_filter(vec![run], &cfg());
        assert_eq!(out.exclusions.len(), 1);
        assert_eq!(out.exclusions[0].stage, Stage::NotAccepted);
        assert_eq!(out.exclusions[0].detail, "publication_marker=\"NC\"");
    }

    #[test]
    fn date_stages() {
        let mut amb = synthetic_run("a", 2020, Vendor::Intel);
        amb.hw_availability = DateField::Ambiguous("Feb-20".into());
        let mut early = synthetic_run("b", 2020, Vendor::Intel);
        early.sw_availability = DateField::Known(MonthYear::new(1999, 1).unwrap());
        let mut late = synthetic_run("c", 2020, Vendor::Intel);
        late.hw_availability = DateField::Known(MonthYear::new(2024, 7).unwrap());
        let mut gap = synthetic_run("d", 2020, Vendor::Intel);
        gap.test_date = DateField::Known(MonthYear::new(2018, 1).unwrap());
        gap.hw_availability = DateField::Known(MonthYear::new(2020, 2).unwrap());
        let mut ok_gap = synthetic_run("e", 2020, Vendor::Intel);
        ok_gap.test_date = DateField::Known(MonthYear::new(2018, 2).unwrap());
        ok_gap.hw_availability = DateField::Known(MonthYear::new(2020, 2).unwrap());
        let mut no_pub = synthetic_run("f", 2020, Vendor::Intel);
        no_pub.submission_date = DateField::Missing;
        let out = consistency_filter(vec![amb, early, late, gap, ok_gap, no_pub], &cfg());
        let stages: Vec<_> = out.exclusions.iter().map(|e| (e.result_id.as_str(), e.stage)).collect();
        assert_eq!(
            stages,
            [
                ("a", Stage::AmbiguousDate),
                ("b", Stage::ImplausibleDate),
                ("c", Stage::ImplausibleDate),
                ("d", Stage::ImplausibleDate),
            ]
        );
        assert_eq!(out.report.retained_count, 2);
    }

    #[test]
    fn cpu_and_node_stages() {
        let mut two = synthetic_run("a", 2020, Vendor::Intel);
        two.cpu_names.push("Intel Xeon Gold 6148".into());
        let mut both = synthetic_run("b", 2020, Vendor::Intel);
        both.cpu_name = "Intel AMD Xeon".into();
        both.cpu_names = vec![both.cpu_name.clone()];
        let mut nodes = synthetic_run("c", 2020, Vendor::Intel);
        nodes.nodes = None;
        let mut smt8 = synthetic_run("d", 2020, Vendor::Intel);
        smt8.threads_total = Some(smt8.cores_total * 8);
        let out = consistency_filter(vec![two, both, nodes, smt8], &cfg());
        let stages: Vec<_> = out.exclusions.iter().map(|e| e.stage).collect();
        assert_eq!(
            stages,
            [
                Stage::AmbiguousCpuName,
                Stage::AmbiguousCpuName,
                Stage::MissingNodeCount,
                Stage::ImplausibleCoreThread
            ]
        );
    }

    #[test]
    fn comparability_examples() {
        let keep = synthetic_run("keep", 2020, Vendor::Amd);
        assert_eq!(keep.marketing_class, MarketingClass::Epyc);
        let mut multi = synthetic_run("multi", 2020, Vendor::Amd);
        multi.nodes = Some(4);
        let mut quad = synthetic_run("quad", 2020, Vendor::Intel);
        quad.sockets = 4;
        quad.cores_total = quad.cores_per_chip * 4;
        let mut sparc = synthetic_run("sparc", 2020, Vendor::Other);
        sparc.cpu_name = "SuperSPARC IX".into();
        let mut core_i7 = synthetic_run("desk", 2020, Vendor::Intel);
        core_i7.marketing_class = MarketingClass::Other;
        let out = comparability_filter(vec![keep, multi, quad, sparc, core_i7], &cfg());
        assert_eq!(out.retained.len(), 1);
        assert_eq!(out.retained[0].result_id, "keep");
        assert_eq!(out.report.count(Stage::MultiNodeOrManySocket), 2);
        assert_eq!(out.report.count(Stage::NonIntelAmd), 1);
        assert_eq!(out.report.count(Stage::NonServerClass), 1);
    }

    #[test]
    fn canonical_year_projection() {
        let mut run = synthetic_run("r", 2023, Vendor::Intel);
        run.hw_availability = DateField::Known(MonthYear::new(2023, 2).unwrap());
        assert_eq!(canonical_year(&run), Ok(2023));
        run.hw_availability = DateField::Known(MonthYear::new(2005, 11).unwrap());
        assert_eq!(canonical_year(&run), Ok(2005));
        run.hw_availability = DateField::Known(MonthYear::new(2024, 1).unwrap());
        assert_eq!(canonical_year(&run), Ok(2024));
        run.hw_availability = DateField::Missing;
        assert!(canonical_year(&run).is_err());
    }

    #[test]
    fn stage_names_parse_back() {
        for s in Stage::ALL {
            assert_eq!(s.to_string().parse::<Stage>(), Ok(s));
        }
    }
}
