use std::io::Write;

use crate::error::Result;

use super::ExperimentConfig;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Output of one experiment: `# key: value` header lines, then a CSV body.
///
/// Only the body is promised to be reproducible; the header may carry
/// run-dependent facts such as a budget cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub metadata: Vec<(String, String)>,
    /// Human-readable pass/fail lines, also written to the header.
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
    /// Invariant violations; a nonzero count maps to exit code 2.
    pub violations: usize,
    pub body: String,
}

impl Report {
    pub(crate) fn new(config: &ExperimentConfig) -> Self {
        let metadata = vec![
            ("tool".to_string(), TOOL_VERSION.to_string()),
            (
                "experiment".to_string(),
                config.experiment.kind().to_string(),
            ),
            ("config_sha256".to_string(), config.sha256()),
            ("seed".to_string(), config.seed.to_string()),
            ("tolerance".to_string(), format!("{:e}", config.tolerance)),
            ("config".to_string(), config.canonical_json()),
        ];
        Self {
            metadata,
            summary: Vec::new(),
            warnings: Vec::new(),
            violations: 0,
            body: String::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Records a named check; failures add to the violation count.
    pub fn check(&mut self, name: &str, checked: usize, passed: usize) {
        self.violations += checked - passed;
        let status = if checked == passed { "pass" } else { "FAIL" };
        self.summary
            .push(format!("{status} {name}: {passed}/{checked}"));
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        for s in &self.summary {
            writeln!(out, "# summary: {s}")?;
        }
        for w in &self.warnings {
            writeln!(out, "# warning: {w}")?;
        }
        writeln!(out, "# violations: {}", self.violations)?;
        out.write_all(self.body.as_bytes())?;
        Ok(())
    }
}

/// Strips `#` header lines, leaving the CSV body.
pub fn csv_body(document: &str) -> String {
    document
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
