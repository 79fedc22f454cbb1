use std::sync::LazyLock;

use regex::Regex;

use crate::model::{MarketingClass, OsFamily, Vendor};

/// Core/chip counts declared on the `CPU(s) Enabled` line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CpuEnabled {
    pub cores_total: u32,
    pub sockets: u32,
    pub cores_per_chip: u32,
}

static CPU_ENABLED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)^\s*(\d+)\s*cores?\s*,\s*(\d+)\s*chips?\s*,\s*(\d+)\s*cores?\s*(?:/|per)\s*chips?\s*$",
    )
    .unwrap()
});

/// Parses `"<N> cores, <M> chips, <K> cores/chip"`. Returns `None` when the
/// text deviates from that grammar or any count is zero.
pub fn parse_cpu_enabled(text: &str) -> Option<CpuEnabled> {
    let c = CPU_ENABLED.captures(text)?;
    let n = |i: usize| c[i].parse::<u32>().ok().filter(|&v| v > 0);
    Some(CpuEnabled {
        cores_total: n(1)?,
        sockets: n(2)?,
        cores_per_chip: n(3)?,
    })
}

pub fn format_cpu_enabled(e: CpuEnabled) -> String {
    let plural = |n: u32, one: &'static str, many: &'static str| if n == 1 { one } else { many };
    format!(
        "{} {}, {} {}, {} {}/chip",
        e.cores_total,
        plural(e.cores_total, "core", "cores"),
        e.sockets,
        plural(e.sockets, "chip", "chips"),
        e.cores_per_chip,
        plural(e.cores_per_chip, "core", "cores"),
    )
}

fn tokens(name: &str) -> impl Iterator<Item = String> + '_ {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_ascii_lowercase())
}

/// Case-insensitive token match on the CPU name. A name carrying both vendor
/// tokens is classified as `Other`.
pub fn classify_vendor_and_class(cpu_name: &str) -> (Vendor, MarketingClass) {
    let mut intel = false;
    let mut amd = false;
    let mut class = MarketingClass::Other;
    for tok in tokens(cpu_name) {
        match tok.as_str() {
            "intel" => intel = true,
            "amd" => amd = true,
            "xeon" if class == MarketingClass::Other => class = MarketingClass::Xeon,
            "opteron" if class == MarketingClass::Other => class = MarketingClass::Opteron,
            "epyc" if class == MarketingClass::Other => class = MarketingClass::Epyc,
            _ => {}
        }
    }
    let vendor = match (intel, amd) {
        (true, false) => Vendor::Intel,
        (false, true) => Vendor::Amd,
        _ => Vendor::Other,
    };
    (vendor, class)
}

pub(crate) fn has_both_vendor_tokens(cpu_name: &str) -> bool {
    let toks: Vec<String> = tokens(cpu_name).collect();
    toks.iter().any(|t| t == "intel") && toks.iter().any(|t| t == "amd")
}

pub fn classify_os(os_name: &str) -> OsFamily {
    let lower = os_name.to_ascii_lowercase();
    if lower.contains("windows") {
        return OsFamily::Windows;
    }
    const LINUX: [&str; 5] = ["linux", "suse", "red hat", "ubuntu", "centos"];
    if LINUX.iter().any(|t| lower.contains(t)) {
        OsFamily::Linux
    } else {
        OsFamily::Other
    }
}

static GHZ: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(\d+(?:\.\d+)?)\s*GHz").unwrap());
static MHZ: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)(\d{3,5})\s*MHz").unwrap());

/// Nominal frequency quoted in free text such as `"Quad-Core, 2.33 GHz, 12 MB L2"`.
pub(crate) fn frequency_in_text(text: &str) -> Option<f64> {
    if let Some(c) = GHZ.captures(text) {
        let ghz: f64 = c[1].parse().ok()?;
        return Some((ghz * 1000.0).round());
    }
    MHZ.captures(text).and_then(|c| c[1].parse().ok())
}
