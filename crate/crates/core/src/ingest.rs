//! File ingestion: one-value-per-line files and two-column CSV.

use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

fn parse_value(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    let err = |message: String| Error::Parse {
        path: path.display().to_string(),
        line: line_no,
        message,
    };
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|e| err(format!("expected a number, got {field:?} ({e})")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite value {v}")));
    }
    Ok(v)
}

/// Reads one numeric value per line (UTF-8, `.` decimal separator). Blank
/// lines are skipped; anything else must parse as a finite number.
pub fn read_values_file(path: &Path) -> Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(parse_value(path, i + 1, t)?);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: "file contains no values".into(),
        });
    }
    Ok(values)
}

/// Reads a CSV with columns `value,group`, group being `x` or `y`. A header
/// line `value,group` is allowed and skipped. Returns (x values, y values).
pub fn read_csv_groups(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if i == 0 && t.eq_ignore_ascii_case("value,group") {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let (value_field, group_field) = t
            .split_once(',')
            .ok_or_else(|| err("expected two comma-separated columns value,group".into()))?;
        let value = parse_value(path, i + 1, value_field)?;
        match group_field.trim() {
            "x" | "X" => xs.push(value),
            "y" | "Y" => ys.push(value),
            other => return Err(err(format!("group must be x or y, got {other:?}"))),
        }
    }
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("need both groups; found {} x rows and {} y rows", xs.len(), ys.len()),
        });
    }
    Ok((xs, ys))
}
