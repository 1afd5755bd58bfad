use std::path::Path;

use crate::dataset::SingleLabelDataset;
use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

fn read_records(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: no rows", path.display())));
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    let msg = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        _ => Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        },
    }
}

fn parse_cell(path: &Path, line: usize, col: usize, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            Error::Data(format!(
                "{}:{line}: column {col}: '{s}' is not a number",
                path.display()
            ))
        })
}

/// Loads a headerless numeric CSV. Classes in `label_column` are re-indexed
/// `0..C` in order of first appearance; every other column is a feature.
pub fn load_csv_single_label(path: impl AsRef<Path>, label_column: usize) -> Result<SingleLabelDataset> {
    let path = path.as_ref();
    let rows = read_records(path)?;
    let width = rows[0].1.len();
    if label_column >= width {
        return Err(Error::Config(format!(
            "label column {label_column} out of range for {width} columns"
        )));
    }
    let mut class_names: Vec<String> = Vec::new();
    let mut class_index = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len() * (width - 1));
    for (line, cells) in &rows {
        for (c, cell) in cells.iter().enumerate() {
            if c == label_column {
                let k = match class_names.iter().position(|n| n == cell) {
                    Some(k) => k,
                    None => {
                        class_names.push(cell.clone());
                        class_names.len() - 1
                    }
                };
                class_index.push(k);
            } else {
                values.push(parse_cell(path, *line, c, cell)?);
            }
        }
    }
    let features = DenseMatrix::from_vec(rows.len(), width - 1, values)?;
    SingleLabelDataset::new(features, class_index, class_names)
}

/// Loads a headerless numeric CSV as a plain feature matrix, optionally
/// dropping one column (e.g. a label column).
pub fn load_csv_features(path: impl AsRef<Path>, drop_column: Option<usize>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let rows = read_records(path)?;
    let width = rows[0].1.len();
    if let Some(dc) = drop_column {
        if dc >= width {
            return Err(Error::Config(format!(
                "column {dc} out of range for {width} columns"
            )));
        }
    }
    let cols = width - usize::from(drop_column.is_some());
    let mut values = Vec::with_capacity(rows.len() * cols);
    for (line, cells) in &rows {
        for (c, cell) in cells.iter().enumerate() {
            if Some(c) != drop_column {
                values.push(parse_cell(path, *line, c, cell)?);
            }
        }
    }
    DenseMatrix::from_vec(rows.len(), cols, values)
}
