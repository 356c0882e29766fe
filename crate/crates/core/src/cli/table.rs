//! Self-describing CSV tables with a `# key = value` provenance header.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HorseError, Result};

/// Shortest round-trip decimal; non-finite values spelled `nan`, `inf`, `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

pub fn num_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    /// File stem.
    pub name: String,
    /// Input parameters, written first.
    pub inputs: Vec<(String, String)>,
    /// Derived quantities reported after the inputs.
    pub results: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Rows whose status is not `ok`.
    pub failures: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, inputs: Vec<(String, String)>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            inputs,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn result(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.results.push((key.into(), value.into()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# horse {}", env!("CARGO_PKG_VERSION")).unwrap();
        for (k, v) in &self.inputs {
            writeln!(s, "# {k} = {v}").unwrap();
        }
        for (k, v) in &self.results {
            writeln!(s, "# result.{k} = {v}").unwrap();
        }
        writeln!(s, "# result.failed_rows = {}", self.failures).unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for r in &self.rows {
            writeln!(s, "{}", r.join(",")).unwrap();
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.render()).map_err(|e| HorseError::Io(format!("{}: {e}", path.display())))
    }
}

/// Short machine-readable tag for a per-row failure.
pub fn status_tag(e: &HorseError) -> &'static str {
    match e {
        HorseError::ClosedChannel { .. } => "closed",
        HorseError::Pole { .. } => "pole",
        HorseError::Degenerate { .. } => "degenerate",
        HorseError::NodeAtRadius { .. } => "node",
        HorseError::Singular { .. } => "singular",
        HorseError::RootBracket { .. } => "no-root",
        HorseError::MatchingInstability { .. } => "unstable",
        _ => "error",
    }
}
