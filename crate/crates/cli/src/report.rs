//! Report assembly and the JSON / CSV writers.

use std::io::Write;

use hadamard_core::{Point, ToleranceProfile};
use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};
use crate::error::CliResult;

/// One predicted property and whether this run confirmed it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub statement: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(statement: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { statement, name: name.into(), passed, detail: detail.into() }
    }
}

/// Rows of numbers: the CSV form of a report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }
}

/// What a command hands back to the report writer.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<Check>,
    pub table: Table,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub statements: Vec<&'static str>,
    pub config: ExperimentConfig,
    pub tolerances: ToleranceProfile,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub results: Value,
    /// The only field that differs between identical runs.
    pub wall_time_seconds: f64,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(
        config: ExperimentConfig,
        tolerances: ToleranceProfile,
        statements: Vec<&'static str>,
        outcome: Outcome,
        wall_time_seconds: f64,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: config.command.name(),
            statements,
            passed: outcome.checks.iter().all(|c| c.passed),
            config,
            tolerances,
            checks: outcome.checks,
            results: outcome.results,
            wall_time_seconds,
            table: outcome.table,
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                out.write_all(b"\n")?;
            }
            Format::Csv => self.write_csv(out)?,
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(|x| number(*x)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// 17 significant digits in scientific notation.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Flat coordinates of a point: Euclidean and model coordinates as they
/// are, tree points as `edge, offset`, products concatenated.
pub fn point_columns(p: &Point) -> Vec<f64> {
    match p {
        Point::Coords(c) => c.clone(),
        Point::Tree(t) => vec![t.edge as f64, t.offset],
        Point::Product(parts) => parts.iter().flat_map(point_columns).collect(),
    }
}
