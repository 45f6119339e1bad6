use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Reads a matrix from CSV with header `f0,..,f{D-1}` and an optional trailing `label` column.
pub fn read_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file).map(|m| m.with_source_tag(path.display().to_string()))
}

pub(crate) fn read_csv_from(reader: impl std::io::Read) -> Result<FeatureMatrix> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_err(&e, 1))?.clone();
    let mut names: Vec<&str> = header.iter().collect();
    let has_label = names.last() == Some(&"label");
    if has_label {
        names.pop();
    }
    for (i, name) in names.iter().enumerate() {
        if *name != format!("f{i}") {
            return Err(Error::Csv { line: 1, message: format!("expected header f{i}, found {name:?}") });
        }
    }
    let cols = names.len();
    let width = header.len();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&e, 0))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(Error::Csv {
                line,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        for (i, cell) in rec.iter().take(cols).enumerate() {
            let v: f32 = cell.parse().map_err(|_| Error::Csv {
                line,
                message: format!("column f{i}: {cell:?} is not a number"),
            })?;
            values.push(v);
        }
        if has_label {
            let cell = &rec[cols];
            labels.push(cell.parse::<u32>().map_err(|_| Error::Csv {
                line,
                message: format!("label {cell:?} is not a non-negative integer"),
            })?);
        }
        rows += 1;
    }
    FeatureMatrix::with_labels(rows, cols, values, has_label.then_some(labels))
}

fn csv_err(e: &csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Csv { line, message: e.to_string() }
}

/// Writes `m` as CSV using the shortest representation that parses back to the same `f32`.
pub fn write_csv(m: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    m.validate()?;
    let path = path.as_ref();
    let mut out = String::new();
    let header: Vec<String> = (0..m.cols()).map(|i| format!("f{i}")).collect();
    out.push_str(&header.join(","));
    if m.labels().is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (i, row) in m.iter_rows().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        if let Some(l) = m.labels() {
            out.push_str(&format!(",{}", l[i]));
        }
        out.push('\n');
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
