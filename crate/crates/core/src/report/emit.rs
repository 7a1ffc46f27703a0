//! JSON and CSV output. Every number is a full-precision decimal string, and
//! JSON keys come out sorted, so identical runs give identical bytes.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::result::{CheckResult, Provenance};
use super::suite::Report;
use crate::error::{Error, Result};
use crate::precision::{fmt_float, parse_float};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub label: String,
    pub max_residual: String,
    pub scale: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub description: String,
    pub max_residual: String,
    pub scale: String,
    pub tolerance: String,
    pub pass: bool,
    pub window: String,
    pub provenance: Provenance,
    pub components: Vec<ComponentRecord>,
}

/// Serialized form of a [`Report`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub weight: String,
    pub size: usize,
    pub bits: u32,
    pub tolerance: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl From<&CheckResult> for CheckRecord {
    fn from(c: &CheckResult) -> Self {
        Self {
            name: c.name.clone(),
            description: c.description.clone(),
            max_residual: fmt_float(&c.max_residual),
            scale: fmt_float(&c.scale),
            tolerance: fmt_float(&c.tolerance),
            pass: c.pass,
            window: c.window.clone(),
            provenance: c.provenance.clone(),
            components: c
                .components
                .iter()
                .map(|x| ComponentRecord {
                    label: x.label.clone(),
                    max_residual: fmt_float(&x.max_residual),
                    scale: fmt_float(&x.scale),
                })
                .collect(),
        }
    }
}

impl From<&Report> for ReportRecord {
    fn from(r: &Report) -> Self {
        Self {
            weight: r.weight.clone(),
            size: r.size,
            bits: r.bits,
            tolerance: fmt_float(&r.tolerance),
            pass: r.pass,
            checks: r.checks.iter().map(CheckRecord::from).collect(),
        }
    }
}

impl CheckRecord {
    /// `max_residual` parsed back at `bits`.
    pub fn max_residual_at(&self, bits: u32) -> Result<rug::Float> {
        parse_float(&self.max_residual, bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format `{s}` (json or csv)"))),
        }
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("json: {e}"))
}

/// Pretty JSON with sorted keys.
pub fn to_json(report: &Report) -> Result<String> {
    // serde_json's map is ordered by key, so going through `Value` sorts every object.
    let v = serde_json::to_value(ReportRecord::from(report)).map_err(json_err)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(json_err)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json(s: &str) -> Result<ReportRecord> {
    serde_json::from_str(s).map_err(json_err)
}

/// `name,max_residual,scale,tolerance,pass`, one row per check.
pub fn to_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    w.write_record(["name", "max_residual", "scale", "tolerance", "pass"]).map_err(csv_err)?;
    for c in &report.checks {
        let pass = if c.pass { "true" } else { "false" };
        w.write_record([
            c.name.as_str(),
            &fmt_float(&c.max_residual),
            &fmt_float(&c.scale),
            &fmt_float(&c.tolerance),
            pass,
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &Report, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, render(report, format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    #[test]
    fn empty_report() {
        let r = Report::new("eta=1".into(), 3, 64, Float::with_val(64, 1e-5), vec![]);
        assert!(r.pass);
        let rec = parse_json(&to_json(&r).unwrap()).unwrap();
        assert!(rec.checks.is_empty() && rec.pass);
        assert_eq!(to_csv(&r).unwrap(), "name,max_residual,scale,tolerance,pass\n");
    }
}
