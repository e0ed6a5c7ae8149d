//! CSV ingestion with column kind inference.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use pld_core::table::{Cell, Column, ColumnKind, RawTable};

use crate::error::{PldError, Result};

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

fn infer_kind(cells: &[String]) -> ColumnKind {
    let present = || cells.iter().filter(|c| !c.is_empty());
    if present().all(|c| parse_bool(c).is_some()) {
        ColumnKind::Boolean
    } else if present().all(|c| c.parse::<f64>().is_ok_and(f64::is_finite)) {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    }
}

/// Reads a headed CSV file. Column kinds are inferred unless given in `hints`.
pub fn load_csv(path: &Path, hints: &BTreeMap<String, ColumnKind>) -> Result<RawTable> {
    let file = std::fs::File::open(path).map_err(|e| PldError::io(path, e))?;
    read_csv(file, hints)
}

pub fn read_csv(input: impl Read, hints: &BTreeMap<String, ColumnKind>) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let csv_err = |e: csv::Error| PldError::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => format!("row has {} fields, header has {}", len, expected_len),
            _ => e.to_string(),
        },
    };
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        lines.push(record.position().map_or(0, |p| p.line()));
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(field.to_string());
        }
    }

    let mut columns = Vec::with_capacity(header.len());
    for (name, cells) in header.into_iter().zip(raw) {
        let kind = hints
            .get(&name)
            .copied()
            .unwrap_or_else(|| infer_kind(&cells));
        let mut typed = Vec::with_capacity(cells.len());
        for (row, text) in cells.into_iter().enumerate() {
            let cell = if text.is_empty() {
                Some(Cell::Missing)
            } else {
                match kind {
                    ColumnKind::Boolean => parse_bool(&text).map(Cell::Bool),
                    ColumnKind::Numeric => text
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Cell::Num),
                    ColumnKind::Categorical => Some(Cell::Text(text.clone())),
                }
            };
            match cell {
                Some(c) => typed.push(c),
                None => {
                    return Err(PldError::CellType {
                        line: lines[row],
                        column: name,
                        cell: text,
                        kind: kind.as_str(),
                    })
                }
            }
        }
        columns.push(Column {
            name,
            kind,
            cells: typed,
        });
    }
    Ok(RawTable::new(columns)?)
}
