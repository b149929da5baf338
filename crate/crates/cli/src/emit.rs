//! Report serialization.
//!
//! JSON output is canonical: object keys sorted, no insignificant
//! whitespace except one newline at the end, floats written with 12
//! significant digits in exponent form (`2.82842712475e0`), integers as
//! integers, `-0` written as `0`, non-finite floats as `null`.

use std::io::Write;

use serde_json::Value;

use crate::error::CliError;
use crate::report::{Cell, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

pub fn emit(report: &Report, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => out.write_all(canonical_json(report).as_bytes())?,
        Format::Text => out.write_all(text(report).as_bytes())?,
        Format::Csv => write_csv(report, out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn canonical_json(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("report is always serializable");
    let mut s = String::new();
    write_value(&value, &mut s);
    s.push('\n');
    s
}

pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("string"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => format_float(*x),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

/// Human-readable rendering with aligned tables.
pub fn text(report: &Report) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{} {}  scenario: {}  seed: {}  samples: {}\nrng: {}\n",
        report.tool,
        report.tool_version,
        report.scenario,
        report.seed,
        report.config.samples(),
        report.rng
    ));
    if !report.notes.is_empty() {
        s.push_str("\nnotes:\n");
        for n in &report.notes {
            s.push_str(&format!("  {n}\n"));
        }
    }
    if !report.verdicts.is_empty() {
        s.push_str("\nverdicts:\n");
        let w = report.verdicts.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in &report.verdicts {
            s.push_str(&format!("  {k:<w$}  {}\n", cell_text(v)));
        }
    }
    if !report.values.is_empty() {
        s.push_str("\nvalues:\n");
        let w = report.values.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in &report.values {
            s.push_str(&format!("  {k:<w$}  {}\n", format_float(*v)));
        }
    }
    for t in &report.tables {
        s.push_str(&format!("\n{}:\n", t.name));
        let rows: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(cell_text).collect()).collect();
        let widths: Vec<usize> = (0..t.columns.len())
            .map(|c| {
                rows.iter()
                    .map(|r| r[c].len())
                    .chain(std::iter::once(t.columns[c].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            format!("  {}\n", parts.join("  ").trim_end())
        };
        s.push_str(&line(&t.columns));
        for r in &rows {
            s.push_str(&line(r));
        }
    }
    s
}

/// One block per table: a header row `table,<columns…>` followed by data
/// rows `<name>,<cells…>`. Scalar values come first as table `values`.
pub fn write_csv(report: &Report, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["table", "key", "value"]).map_err(io)?;
    for (k, v) in &report.values {
        w.write_record(["values", k, &format_float(*v)]).map_err(io)?;
    }
    for (k, v) in &report.verdicts {
        w.write_record(["verdicts", k, &cell_text(v)]).map_err(io)?;
    }
    for t in &report.tables {
        let mut header = vec!["table".to_string()];
        header.extend(t.columns.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for r in &t.rows {
            let mut rec = vec![t.name.clone()];
            rec.extend(r.iter().map(cell_text));
            w.write_record(&rec).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
