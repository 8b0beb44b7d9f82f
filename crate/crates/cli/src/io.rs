//! Reading point files, label columns and Newick files.

use std::fs;
use std::path::Path;

use tropstat::tree::{parse_newick, PhyloTree};
use tropstat::TropicalPoint;

use crate::error::{CliError, CliResult, DIMENSION};

/// Rows of a rectangular CSV file of finite floats.
pub fn read_rows(path: &Path, header: bool) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => CliError::parse(format!(
                "{}: line {}: expected {expected_len} fields, found {len}",
                path.display(),
                pos.as_ref().map_or(0, |p| p.line()),
            )),
            _ => CliError::parse(format!("{}: {e}", path.display())),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                parse_cell(cell).ok_or_else(|| {
                    CliError::parse(format!(
                        "{}: line {line}, column {}: {cell:?} is not a finite number",
                        path.display(),
                        col + 1
                    ))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::parse(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses `"0,3,1"` as a vector.
pub fn parse_inline(text: &str) -> Option<Vec<f64>> {
    text.split(',').map(|c| parse_cell(c.trim())).collect()
}

pub fn to_points(rows: Vec<Vec<f64>>) -> CliResult<Vec<TropicalPoint>> {
    rows.into_iter()
        .map(|r| TropicalPoint::new(r).map_err(|e| CliError::new(DIMENSION, e.to_string())))
        .collect()
}

pub fn read_points(path: &Path, header: bool) -> CliResult<Vec<TropicalPoint>> {
    to_points(read_rows(path, header)?)
}

/// Splits a label column (default: the last) off a CSV file.
pub fn read_labeled(
    path: &Path,
    header: bool,
    column: Option<usize>,
) -> CliResult<(Vec<TropicalPoint>, Vec<u8>)> {
    let rows = read_rows(path, header)?;
    let width = rows[0].len();
    let col = column.unwrap_or(width - 1);
    if col >= width {
        return Err(CliError::parameter(format!(
            "label column {col} out of range for {width} columns"
        )));
    }
    let mut points = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (k, mut row) in rows.into_iter().enumerate() {
        let l = row.remove(col);
        if l != 0.0 && l != 1.0 {
            return Err(CliError::parse(format!(
                "{}: row {}: label {l} is not 0 or 1",
                path.display(),
                k + 1
            )));
        }
        labels.push(l as u8);
        points.push(row);
    }
    Ok((to_points(points)?, labels))
}

/// Trees of a Newick file, one per `;`-terminated entry.
pub fn read_newick(path: &Path) -> CliResult<Vec<PhyloTree>> {
    let text = read_text(path)?;
    let mut trees = Vec::new();
    let mut start = 0;
    for (end, _) in text.match_indices(';') {
        let chunk = &text[start..=end];
        let offset = start + (chunk.len() - chunk.trim_start().len());
        start = end + 1;
        let tree = parse_newick(chunk.trim()).map_err(|e| match e {
            tropstat::Error::Parse { offset: o, message } => {
                let at = offset + o;
                let line = text[..at.min(text.len())].matches('\n').count() + 1;
                CliError::parse(format!("{}: line {line}: {message}", path.display()))
            }
            other => other.into(),
        })?;
        trees.push(tree);
    }
    if !text[start..].trim().is_empty() {
        return Err(CliError::parse(format!(
            "{}: trailing text without ';'",
            path.display()
        )));
    }
    if trees.is_empty() {
        return Err(CliError::parse(format!("{}: no trees", path.display())));
    }
    Ok(trees)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::parameter(format!("{}: {e}", path.display())))
}
