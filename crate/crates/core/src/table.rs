//! Typed tabular input prior to binarization.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::DataError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Boolean,
    Categorical,
    Numeric,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Boolean => "boolean",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Numeric => "numeric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boolean" | "bool" => Some(ColumnKind::Boolean),
            "categorical" | "category" => Some(ColumnKind::Categorical),
            "numeric" | "number" => Some(ColumnKind::Numeric),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Missing,
    Bool(bool),
    Num(f64),
    Text(String),
}

impl Cell {
    fn fits(&self, kind: ColumnKind) -> bool {
        matches!(
            (self, kind),
            (Cell::Missing, _)
                | (Cell::Bool(_), ColumnKind::Boolean)
                | (Cell::Num(_), ColumnKind::Numeric)
                | (Cell::Text(_), ColumnKind::Categorical)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub cells: Vec<Cell>,
}

impl Column {
    pub fn has_missing(&self) -> bool {
        self.cells.iter().any(|c| matches!(c, Cell::Missing))
    }
}

/// Columns of typed cells, all of the same length.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    columns: Vec<Column>,
    n_objects: usize,
}

impl RawTable {
    pub fn new(columns: Vec<Column>) -> Result<Self, DataError> {
        let n_objects = columns.first().map_or(0, |c| c.cells.len());
        for col in &columns {
            if col.cells.len() != n_objects {
                return Err(DataError::Ragged {
                    column: col.name.clone(),
                    expected: n_objects,
                    found: col.cells.len(),
                });
            }
            if let Some(row) = col.cells.iter().position(|c| !c.fits(col.kind)) {
                return Err(DataError::KindMismatch {
                    column: col.name.clone(),
                    row,
                    kind: col.kind,
                });
            }
        }
        for (i, col) in columns.iter().enumerate() {
            if columns[..i].iter().any(|c| c.name == col.name) {
                return Err(DataError::DuplicateColumn(col.name.clone()));
            }
        }
        Ok(RawTable { columns, n_objects })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn ragged_columns_rejected() {
        let cols = vec![
            Column {
                name: "a".to_string(),
                kind: ColumnKind::Boolean,
                cells: vec![Cell::Bool(true), Cell::Bool(false)],
            },
            Column {
                name: "b".to_string(),
                kind: ColumnKind::Boolean,
                cells: vec![Cell::Bool(true)],
            },
        ];
        assert!(matches!(RawTable::new(cols), Err(DataError::Ragged { .. })));
    }

    #[test]
    fn cell_kind_checked() {
        let cols = vec![Column {
            name: "a".to_string(),
            kind: ColumnKind::Numeric,
            cells: vec![Cell::Num(1.0), Cell::Missing, Cell::Text("x".to_string())],
        }];
        match RawTable::new(cols) {
            Err(DataError::KindMismatch { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {:?}", other),
        }
    }
}
