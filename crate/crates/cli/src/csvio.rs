//! CSV reading and writing. Floats are emitted with 17 significant digits
//! (round-trip exact for doubles); files are UTF-8 with a header row and a
//! `.` decimal separator.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// One CSV cell.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes header and rows; the result is bitwise-stable for equal input.
pub fn render_csv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            match cell {
                Cell::Int(v) => {
                    let _ = write!(out, "{v}");
                }
                Cell::Float(v) => {
                    let _ = write!(out, "{v:.16e}");
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
    std::fs::write(path, render_csv(header, rows))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// A parsed CSV: header names and numeric rows.
#[derive(Debug)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Io(format!("csv has no column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Reads a numeric CSV; malformed content errors with its row number.
pub fn read_csv(path: &Path) -> Result<CsvTable, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let Some((_, header_line)) = lines.next() else {
        return Err(CliError::Io(format!("{}: empty csv", path.display())));
    };
    let header: Vec<String> = header_line
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let row_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(header.len());
        for field in line.split(',') {
            let value = field.trim().parse::<f64>().map_err(|_| {
                CliError::Io(format!(
                    "{}: malformed csv at row {row_no}: `{field}` is not a number",
                    path.display()
                ))
            })?;
            row.push(value);
        }
        if row.len() != header.len() {
            return Err(CliError::Io(format!(
                "{}: malformed csv at row {row_no}: expected {} fields, got {}",
                path.display(),
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}
