//! Report assembly and the stable-output contract.
//!
//! A report echoes the full configuration, carries every numeric result next
//! to the tolerance it was compared against, and keeps wall-clock timings in
//! a separate trailing field: everything except `timings_ms` is byte-stable
//! for identical configurations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// False when the value rests on strided (lower-bound) scans and the
    /// comparison is reported but not asserted.
    pub asserted: bool,
}

impl Check {
    /// `value <= tolerance` style check.
    pub fn upper(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value <= tolerance, asserted: true }
    }

    /// `value >= tolerance` style check (slack nonnegative).
    pub fn lower(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value >= tolerance, asserted: true }
    }

    pub fn unasserted(mut self) -> Self {
        self.asserted = false;
        self.pass = true;
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    /// Wall-clock timings; excluded from the byte-stability contract.
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            results: serde_json::Value::Null,
            checks: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn print(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
    }
}

/// Write a CSV with 17 significant digits per value ({:.16e}), one header row.
pub fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Read a CSV produced by `write_csv`: a header row, then a time column
/// followed by one or more value columns on a uniform grid.
pub fn read_csv(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut times = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 2 {
            return Err(format!("line {}: expected time,value columns", idx + 1));
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); cells.len() - 1];
        }
        if cells.len() - 1 != columns.len() {
            return Err(format!("line {}: inconsistent column count", idx + 1));
        }
        let t: f64 = cells[0].trim().parse().map_err(|_| format!("line {}: bad time '{}'", idx + 1, cells[0]))?;
        times.push(t);
        for (c, cell) in cells[1..].iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| format!("line {}: bad value '{cell}'", idx + 1))?;
            columns[c].push(v);
        }
    }
    if times.len() < 2 {
        return Err("need at least two data rows".into());
    }
    Ok((times, columns))
}
