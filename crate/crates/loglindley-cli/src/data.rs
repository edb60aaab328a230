//! Dataset ingestion and generation.
//!
//! Input CSVs are UTF-8 with a `value` header (one group) or a
//! `group,value` header (two groups), `.` as the decimal separator.  An
//! optional scale divisor is applied before validation; every value must
//! land strictly inside (0, 1).  All diagnostics carry 1-based line numbers.

use std::path::Path;

use loglindley::distribution::Sample;

use crate::{CliError, CliResult};

/// Loads a one-group CSV (header `value`).
pub fn load_one_group(path: &Path, scale: Option<f64>) -> CliResult<Sample> {
    let mut reader = open(path)?;
    expect_headers(&mut reader, path, &["value"])?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 1 {
            return Err(CliError::input(format!(
                "{}:{line}: expected 1 field, found {}",
                path.display(),
                record.len()
            )));
        }
        values.push(parse_value(&record[0], path, line, scale)?);
    }
    if values.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    Ok(Sample::new(values)?)
}

/// Loads a two-group CSV (header `group,value`); returns the two group
/// labels in first-appearance order with their samples.
pub fn load_two_group(
    path: &Path,
    scale: Option<f64>,
) -> CliResult<((String, Sample), (String, Sample))> {
    let mut reader = open(path)?;
    expect_headers(&mut reader, path, &["group", "value"])?;
    let mut labels: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(CliError::input(format!(
                "{}:{line}: expected 2 fields, found {}",
                path.display(),
                record.len()
            )));
        }
        let label = record[0].trim().to_string();
        if label.is_empty() {
            return Err(CliError::input(format!("{}:{line}: empty group label", path.display())));
        }
        let value = parse_value(&record[1], path, line, scale)?;
        match labels.iter().position(|l| *l == label) {
            Some(idx) => groups[idx].push(value),
            None => {
                if labels.len() == 2 {
                    return Err(CliError::input(format!(
                        "{}:{line}: third group label {label:?} (expected exactly two)",
                        path.display()
                    )));
                }
                labels.push(label);
                groups.push(vec![value]);
            }
        }
    }
    if labels.len() != 2 {
        return Err(CliError::input(format!(
            "{}: expected exactly two groups, found {}",
            path.display(),
            labels.len()
        )));
    }
    let second = groups.pop().expect("two groups");
    let first = groups.pop().expect("two groups");
    let label_b = labels.pop().expect("two labels");
    let label_a = labels.pop().expect("two labels");
    Ok(((label_a, Sample::new(first)?), (label_b, Sample::new(second)?)))
}

fn open(path: &Path) -> CliResult<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn expect_headers(
    reader: &mut csv::Reader<std::fs::File>,
    path: &Path,
    expected: &[&str],
) -> CliResult<()> {
    let headers =
        reader.headers().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(CliError::input(format!(
            "{}:1: expected header `{}`, found `{}`",
            path.display(),
            expected.join(","),
            found.join(",")
        )));
    }
    Ok(())
}

fn parse_value(raw: &str, path: &Path, line: u64, scale: Option<f64>) -> CliResult<f64> {
    let mut v: f64 = raw.trim().parse().map_err(|_| {
        CliError::input(format!("{}:{line}: cannot parse {raw:?} as a number", path.display()))
    })?;
    if let Some(s) = scale {
        if !(s.is_finite() && s > 0.0) {
            return Err(CliError::input(format!("scale must be positive, got {s}")));
        }
        v /= s;
    }
    if !(v.is_finite() && v > 0.0 && v < 1.0) {
        return Err(CliError::input(format!(
            "{}:{line}: value {v} is outside the open interval (0, 1){}",
            path.display(),
            if scale.is_some() { " after scaling" } else { "" }
        )));
    }
    Ok(v)
}

/// Writes a one-group CSV (`value` header).
pub fn write_one_group<W: std::io::Write>(values: &[f64], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value"]).map_err(write_err)?;
    for v in values {
        w.write_record([format!("{v}")]).map_err(write_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a two-group CSV (`group,value` header).
pub fn write_two_group<W: std::io::Write>(groups: &[(&str, &[f64])], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "value"]).map_err(write_err)?;
    for (label, values) in groups {
        for v in *values {
            w.write_record([label.to_string(), format!("{v}")]).map_err(write_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_err(e: csv::Error) -> CliError {
    CliError::input(format!("CSV write failed: {e}"))
}
