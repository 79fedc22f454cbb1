use std::fmt;

/// Which run population a table was computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    /// Runs that survived the consistency stages.
    Parsed(usize),
    /// Runs that also survived the comparability stages.
    Comparable(usize),
    /// Every successfully parsed document, before any filtering.
    Unfiltered(usize),
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Population::Parsed(n) => write!(f, "consistent runs, n={n}"),
            Population::Comparable(n) => write!(f, "comparable runs, n={n}"),
            Population::Unfiltered(n) => write!(f, "parsed documents, n={n}"),
        }
    }
}

/// A delimited table. Serialized as a `# population: ...` line, a header
/// row and the data rows, comma-separated, LF-terminated.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub population: Population,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, population: Population, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            population,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        format!("# population: {}\n{body}", self.population)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}
