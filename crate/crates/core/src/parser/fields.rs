//! Label-anchored field extraction.
//!
//! Reports lay fields out either one per line or several per line in
//! columns (`Test Date:  Jan-2023     Publication:  Feb-2023`). A known label
//! counts when it starts the line or follows a run of at least two spaces;
//! its value runs up to the next such label.

/// Document region a field was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Header,
    Aggregate,
    /// `System Under Test` block; the index counts SUT sets from zero.
    Sut(usize),
    Controller,
    Other,
}

#[derive(Debug, Clone)]
pub struct Field<'a> {
    pub label: &'a str,
    pub value: &'a str,
    pub section: Section,
}

const KNOWN_LABELS: &[&str] = &[
    "Test Sponsor",
    "SPEC License #",
    "Test Method",
    "Tested By",
    "Test Location",
    "Test Date",
    "Hardware Availability",
    "Software Availability",
    "Publication",
    "System Source",
    "System Designation",
    "Power Provisioning",
    "# of Nodes",
    "# of Chips",
    "# of Cores",
    "# of Threads",
    "Total RAM (GB)",
    "Set Identifier",
    "Set Description",
    "# of Identical Nodes",
    "Comment",
    "Hardware Vendor",
    "Model",
    "Form Factor",
    "CPU Name",
    "CPU Characteristics",
    "CPU Frequency (MHz)",
    "CPU(s) Enabled",
    "Hardware Threads",
    "CPU(s) Orderable",
    "CPU Description",
    "Primary Cache",
    "Secondary Cache",
    "Tertiary Cache",
    "Other Cache",
    "Memory Amount (GB)",
    "# and size of DIMM",
    "Memory Details",
    "Power Supply Quantity and Rating (W)",
    "Power Supply Details",
    "Power Management",
    "Operating System (OS)",
    "OS Version",
    "Filesystem",
    "JVM Vendor",
    "JVM Version",
];

fn section_heading(trimmed: &str) -> Option<SectionHeading> {
    match trimmed {
        "Aggregate SUT Data" => Some(SectionHeading::Aggregate),
        "System Under Test" => Some(SectionHeading::Sut),
        "Controller System" => Some(SectionHeading::Controller),
        "Measurement Devices" | "Notes" | "Test Notes" | "SUT Notes" | "Power Analyzer" => {
            Some(SectionHeading::Other)
        }
        _ => None,
    }
}

enum SectionHeading {
    Aggregate,
    Sut,
    Controller,
    Other,
}

#[derive(Debug, Default)]
pub struct LabeledFields<'a> {
    fields: Vec<Field<'a>>,
    sut_sets: usize,
}

impl<'a> LabeledFields<'a> {
    pub fn extract(body: &'a str) -> Self {
        let mut out = LabeledFields::default();
        let mut section = Section::Header;
        for line in body.lines() {
            let trimmed = line.trim();
            if let Some(h) = section_heading(trimmed) {
                section = match h {
                    SectionHeading::Aggregate => Section::Aggregate,
                    SectionHeading::Sut => {
                        out.sut_sets += 1;
                        Section::Sut(out.sut_sets - 1)
                    }
                    SectionHeading::Controller => Section::Controller,
                    SectionHeading::Other => Section::Other,
                };
                continue;
            }
            out.scan_line(line, section);
        }
        out
    }

    fn scan_line(&mut self, line: &'a str, section: Section) {
        let mut hits: Vec<(usize, usize, &'static str)> = Vec::new();
        for label in KNOWN_LABELS {
            let mut from = 0;
            while let Some(pos) = line[from..].find(label) {
                let start = from + pos;
                let after = start + label.len();
                from = after;
                let rest = &line[after..];
                let colon = rest.len() - rest.trim_start_matches(' ').len();
                if !rest[colon..].starts_with(':') {
                    continue;
                }
                let before = &line[..start];
                let at_start = before.trim().is_empty();
                if at_start || before.ends_with("  ") {
                    hits.push((start, after + colon + 1, label));
                }
            }
        }
        // a shorter label nested inside a longer one (e.g. "Model" in "Hardware Vendor Model") loses
        hits.sort_by_key(|&(s, e, _)| (s, std::cmp::Reverse(e)));
        hits.dedup_by(|b, a| b.0 < a.1 && b.0 >= a.0);
        if hits.is_empty() {
            // unknown `Label: value` lines still count when the label opens the line
            if let Some((label, value)) = line.split_once(':') {
                let label = label.trim();
                if !label.is_empty() && label.len() <= 60 && !line.starts_with(' ') {
                    self.fields.push(Field { label, value: value.trim(), section });
                }
            }
            return;
        }
        for (i, &(_, value_start, label)) in hits.iter().enumerate() {
            let value_end = hits.get(i + 1).map_or(line.len(), |next| next.0);
            self.fields.push(Field {
                label,
                value: line[value_start..value_end].trim(),
                section,
            });
        }
    }

    pub fn sut_sets(&self) -> usize {
        self.sut_sets
    }

    pub fn iter(&self) -> impl Iterator<Item = &Field<'a>> {
        self.fields.iter()
    }

    /// First value for `label` within sections accepted by `filter`.
    pub fn first_in(&self, label: &str, filter: impl Fn(Section) -> bool) -> Option<&'a str> {
        self.fields
            .iter()
            .find(|f| f.label == label && filter(f.section))
            .map(|f| f.value)
    }

    pub fn all_in(&self, label: &str, filter: impl Fn(Section) -> bool) -> Vec<&'a str> {
        self.fields
            .iter()
            .filter(|f| f.label == label && filter(f.section))
            .map(|f| f.value)
            .collect()
    }

    pub fn header(&self, label: &str) -> Option<&'a str> {
        self.first_in(label, |s| s == Section::Header)
    }

    pub fn sut(&self, label: &str) -> Option<&'a str> {
        self.first_in(label, |s| matches!(s, Section::Sut(_)))
    }

    pub fn aggregate(&self, label: &str) -> Option<&'a str> {
        self.first_in(label, |s| s == Section::Aggregate)
    }
}
