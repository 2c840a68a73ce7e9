use crate::args::Format;
use crate::error::CliError;
use pseudolap::zeros::{format_sig15, round_sig15, CSV_HEADER};
use pseudolap::ZeroRecord;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

/// Rows for CSV output; cells are already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn zeros(records: &[ZeroRecord]) -> Self {
        let mut t = Self::new(&CSV_HEADER.split(',').collect::<Vec<_>>());
        for r in records {
            t.rows.push(vec![
                r.kind.as_str().to_string(),
                format_sig15(r.t),
                r.a.map(format_sig15).unwrap_or_default(),
                format_sig15(r.residual),
                format_sig15(r.bracket.0),
                format_sig15(r.bracket.1),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub body: Value,
    pub table: Option<Table>,
    /// Number of result items, checked against the empty-allowed flag.
    pub items: usize,
}

impl Report {
    pub fn zeros(command: &'static str, records: &[ZeroRecord], extra: Value) -> Self {
        let mut body = json!({ "command": command });
        if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
            b.extend(e);
        }
        body["records"] = serde_json::to_value(records).expect("zero records serialise");
        Self {
            command,
            body,
            table: Some(Table::zeros(records)),
            items: records.len(),
        }
    }
}

/// Every float rounded to 15 significant digits.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig15(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut body = report.body.clone();
            round_floats(&mut body);
            let mut s = serde_json::to_string_pretty(&body).map_err(|e| CliError::numeric(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| CliError::config(format!("{} has no CSV form; use --format json", report.command)))?;
            let mut s = String::new();
            for row in std::iter::once(&table.header).chain(&table.rows) {
                s.push_str(&row.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Writes the report to `out`, or to `stdout` when no path is given.
pub fn emit_report(
    report: &Report,
    format: Format,
    allow_empty: bool,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    if report.items == 0 && !allow_empty {
        return Err(CliError::numeric(format!(
            "{} produced no results; pass --allow-empty to write an empty report",
            report.command
        )));
    }
    let text = render(report, format)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
