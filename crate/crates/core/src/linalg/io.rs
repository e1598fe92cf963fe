//! Matrix file format.
//!
//! JSON: `{"rows": n, "cols": m, "entries": [[re, im], ...]}` in row-major order.
//! CSV: one matrix row per line, cells `a`, `a+bi`, `a-bi` or `bi`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{c, C};

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

pub fn matrix_to_json_value(m: &CMatrix<f64>) -> serde_json::Value {
    let f = MatrixFile { rows: m.rows(), cols: m.cols(), entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect() };
    serde_json::to_value(f).expect("matrix serializes")
}

pub fn matrix_from_json_value(v: &serde_json::Value) -> Result<CMatrix<f64>> {
    let f: MatrixFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("matrix json: {e}")))?;
    CMatrix::new(f.rows, f.cols, f.entries.iter().map(|&[re, im]| c(re, im)).collect())
}

pub fn write_matrix_json(m: &CMatrix<f64>) -> String {
    serde_json::to_string_pretty(&matrix_to_json_value(m)).expect("matrix serializes")
}

pub fn parse_matrix_json(text: &str) -> Result<CMatrix<f64>> {
    let f: MatrixFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("matrix json, line {} column {}: {e}", e.line(), e.column())))?;
    CMatrix::new(f.rows, f.cols, f.entries.iter().map(|&[re, im]| c(re, im)).collect())
}

/// Parse a single complex cell such as `1.5`, `-2e-3+4i`, `0.5-1.25i` or `3i`.
pub fn parse_complex(cell: &str) -> Option<C<f64>> {
    let s: String = cell.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| c(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse::<f64>().ok(),
        }
    };
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, parse_im(&body[k..])?),
        None => (0.0, parse_im(body)?),
    };
    (re.is_finite() && im.is_finite()).then(|| c(re, im))
}

pub fn parse_matrix_csv(text: &str) -> Result<CMatrix<f64>> {
    let mut rows: Vec<Vec<C<f64>>> = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (ci, cell) in line.split(',').enumerate() {
            let z = parse_complex(cell).ok_or_else(|| {
                Error::Parse(format!("csv row {} column {}: cannot parse '{}'", li + 1, ci + 1, cell.trim()))
            })?;
            row.push(z);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "csv row {}: expected {} columns, found {}",
                    li + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("csv: no rows".into()));
    }
    let (n, m) = (rows.len(), rows[0].len());
    CMatrix::new(n, m, rows.into_iter().flatten().collect())
}

/// Shortest round-trip decimal for a complex cell, `a` when the imaginary part is zero.
pub fn format_complex(z: C<f64>) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else {
        let sign = if z.im.is_sign_negative() { "" } else { "+" };
        format!("{:?}{sign}{:?}i", z.re, z.im)
    }
}

pub fn write_matrix_csv(m: &CMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Read a matrix file; `.csv` files use the CSV reader, everything else JSON.
pub fn read_matrix(path: &Path) -> Result<CMatrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv || !text.trim_start().starts_with('{') {
        parse_matrix_csv(&text)
    } else {
        parse_matrix_json(&text)
    }
}
