use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Result of one experiment before it is written out.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    pub table: Table,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `report.json`. Holds no timing, so equal configs give equal bytes.
#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    toolkit_version: &'a str,
    config: &'a ExperimentConfig,
    verdict: &'a str,
    checks: &'a [Check],
    results: &'a serde_json::Value,
}

/// Shortest round-trip decimal, with an exponent for very large or small values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "results.csv";
pub const TIMING_FILE: &str = "timing.json";

pub fn write_outputs(dir: &Path, config: &ExperimentConfig, outcome: &Outcome, seconds: f64) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let report = Report {
        command: config.command(),
        toolkit_version: env!("CARGO_PKG_VERSION"),
        config,
        verdict: if outcome.pass() { "pass" } else { "fail" },
        checks: &outcome.checks,
        results: &outcome.results,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(dir.join(REPORT_FILE), text)?;

    let mut w = csv::Writer::from_path(dir.join(TABLE_FILE))?;
    w.write_record(&outcome.table.headers)?;
    for row in &outcome.table.rows {
        w.write_record(row)?;
    }
    w.flush()?;

    let timing = serde_json::json!({ "command": config.command(), "wall_clock_seconds": seconds });
    fs::write(dir.join(TIMING_FILE), format!("{timing:#}\n"))?;
    Ok(())
}
