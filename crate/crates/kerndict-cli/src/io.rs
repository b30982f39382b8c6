//! CSV ingestion and report emission.
//!
//! Point files are comma-separated numeric rows, one point per row, with an
//! optional header line detected by its first field failing to parse as a
//! number. Gram files are square numeric matrices in the same dialect.
//! Floats are written with Rust's shortest round-trip formatting, so an
//! exported matrix re-reads to the same bits.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kerndict::GramMatrix;

/// Reads a CSV of points, skipping one auto-detected header line.
///
/// Errors carry 1-based line numbers for ragged rows and non-numeric
/// fields.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let rows = read_numeric_rows(path)?;
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(rows)
}

/// Reads a CSV as a symmetric Gram matrix: n rows of n columns.
pub fn read_gram(path: &Path) -> Result<GramMatrix> {
    let rows = read_numeric_rows(path)?;
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    if rows.len() != rows[0].len() {
        bail!(
            "{}: gram matrix must be square, got {} rows of {} columns",
            path.display(),
            rows.len(),
            rows[0].len()
        );
    }
    GramMatrix::from_rows(rows).with_context(|| format!("{}: not a gram matrix", path.display()))
}

fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    let mut header_skipped = false;
    for result in reader.records() {
        let record = result.with_context(|| format!("cannot read {}", path.display()))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(rows.len() as u64 + 1);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        let mut numeric = true;
        for field in record.iter() {
            match field.parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) => {
                    numeric = false;
                    if rows.is_empty() && !header_skipped {
                        break;
                    }
                    bail!(
                        "{} line {line}: field '{field}' is not a number",
                        path.display()
                    );
                }
            }
        }
        if !numeric {
            header_skipped = true;
            continue;
        }
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            bail!(
                "{} line {line}: expected {width} columns, got {}",
                path.display(),
                row.len()
            );
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes a Gram matrix as CSV with round-trippable floats.
pub fn write_gram(path: &Path, k: &GramMatrix) -> Result<()> {
    let mut out = String::new();
    for row in k.to_rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Writes the rendered report to the output path, or stdout when none was
/// given.
pub fn emit(output: Option<&PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
